#pragma once

#include "eqshares/election.hpp"
#include "eqshares/outcome.hpp"
#include "eqshares/rules.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace eqs {

/// Share of voters with zero utility for every selected (or positively
/// funded) project. Zero for an election without voters.
Num exclusion_ratio(const Election& election, const Outcome& outcome);
Num exclusion_ratio(const Election& election, const FractionalOutcome& outcome);

/// Sum over voters of their utility under the given model.
Num satisfaction(const Election& election, const Outcome& outcome, UtilityModel model);
Num satisfaction(const Election& election, const FractionalOutcome& outcome, UtilityModel model);

/// value / reference with 0 / 0 = 1; nullopt when only the reference is zero.
std::optional<Num> relative_to(const Num& value, const Num& reference);

/// Integral: no unselected project fits the remaining budget.
/// Fractional: the whole budget is spent or every project is fully funded.
bool is_exhaustive(const Election& election, const Outcome& outcome);
bool is_exhaustive(const Election& election, const FractionalOutcome& outcome);

Num budget_spent_fraction(const Election& election, const Outcome& outcome);
Num budget_spent_fraction(const Election& election, const FractionalOutcome& outcome);

struct EjrPlusViolation {
  ProjectId project = 0;
  std::vector<VoterId> group;  ///< the least satisfied approvers that witness it
};

struct EjrPlusReport {
  std::size_t count = 0;  ///< number of unselected projects with a violation
  std::vector<EjrPlusViolation> violations;
};

/// EJR+ up to one under cost utilities: an unselected project c violates it
/// when some s of its approvers satisfy s * b / n >= cost(c) and each of them
/// has u_i(W) + cost(c) <= s * b / n. Throws std::invalid_argument unless
/// every score is an approval.
EjrPlusReport ejr_plus_violations(const Election& election, const Outcome& outcome);

struct EjrWitness {
  std::vector<VoterId> group;
  std::vector<ProjectId> projects;
  ProjectId missing = 0;  ///< the unselected project in `projects` that is short
  Num slack;

  friend bool operator==(const EjrWitness&, const EjrWitness&) = default;
};

struct SearchCaps {
  std::size_t max_voters = 12;
  std::size_t max_projects = 10;
};

/// Slack allowed for a group of the given size.
using SlackFn = std::function<Num(std::size_t group_size)>;

/// Exhaustive search over voter groups S and sets T of projects approved by
/// everyone in S with |S| * b >= cost(T) * n. A pair is a witness when every
/// member has u_i(W) < cost(T) - t - cost(c) for some c in T outside W.
/// Cost utilities. Throws std::invalid_argument beyond the caps or on
/// non-approval input.
std::vector<EjrWitness> ejr_up_to_witnesses(const Election& election, const Outcome& outcome, const Num& slack,
                                            SearchCaps caps = {});
std::vector<EjrWitness> ejr_up_to_witnesses(const Election& election, const Outcome& outcome, const SlackFn& slack,
                                            SearchCaps caps = {});

/// (n - |S|) / (2 |S|) * max project cost.
Num overspending_slack(const Election& election, std::size_t group_size);

struct CohesiveSpec {
  std::vector<VoterId> group;
  std::vector<ProjectId> projects;
  std::vector<Num> beta;   ///< aligned with projects
  std::vector<Num> gamma;  ///< aligned with projects
};

/// Both cohesiveness conditions hold.
bool is_cohesive(const Election& election, const CohesiveSpec& spec);

/// Every member of the group gets less than the sum of gamma.
bool refutes(const Election& election, const FractionalOutcome& outcome, const CohesiveSpec& spec);

struct FalsifierReport {
  std::optional<CohesiveSpec> counterexample;
  std::size_t trials = 0;
  std::size_t cohesive_samples = 0;  ///< trials that produced a cohesive spec
};

/// Random search for a cohesive spec that the outcome fails. Groups are
/// sampled uniformly by size then members, T is a random non-empty subset of
/// the projects every member values, beta is drawn from {1/8, ..., 8/8} and
/// gamma(c) = min over the group of u_i(c) * beta(c). Finding nothing is not a
/// proof.
FalsifierReport fractional_ejr_falsifier(const Election& election, const FractionalOutcome& outcome,
                                         std::size_t trials, std::uint64_t seed);

struct AuditReport {
  Num score_satisfaction;
  Num cost_satisfaction;
  std::optional<Num> relative_score_satisfaction;
  std::optional<Num> relative_cost_satisfaction;
  Num exclusion_ratio;
  Num budget_spent_fraction;
  bool exhaustive = false;
  std::optional<std::size_t> ejr_plus_violations;  ///< approval elections with integral outcomes only

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

/// Metrics of one rule result; relative satisfactions are taken against the
/// utilitarian outcome of the same election.
AuditReport audit(const Election& election, const RuleResult& result, const Outcome& utilitarian_outcome);

}  // namespace eqs
