#pragma once

#include "eqshares/election.hpp"
#include "eqshares/outcome.hpp"

#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace eqs {

/// Total order over projects. Listed projects come first in the given order,
/// the rest follow by ascending id. The default is plain ascending id.
class TieBreaker {
 public:
  TieBreaker() = default;
  explicit TieBreaker(std::vector<ProjectId> priority) : priority_(std::move(priority)) {}

  /// rank[c] for every project of an m-project election; lower wins.
  std::vector<std::size_t> ranks(std::size_t n_projects) const;
  std::span<const ProjectId> priority() const { return priority_; }

 private:
  std::vector<ProjectId> priority_;
};

struct RuleConfig {
  TieBreaker tie_breaker;
  Num add1u_step = 1;
  bool exhaustive_redistribution = false;
  /// Verify the affordability residual of every round and, on approval
  /// elections under cost utilities, the overspending-majority property of
  /// BOS rounds. Violations throw InvariantViolation.
  bool check_invariants = false;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A candidate purchase: an alpha fraction bought at price rho per unit of
/// utility, together with each supporter's nominal payment.
struct AffordabilityQuote {
  ProjectId project = 0;
  Num alpha;
  Num rho;
  std::vector<std::pair<VoterId, Num>> payments;

  Num ratio() const { return rho / alpha; }
};

/// Minimal rho with cost = sum_i min(b_i, u_i * rho) over supporters with
/// money. nullopt when the supporters hold less than the cost.
std::optional<AffordabilityQuote> min_rho(ProjectId project, const Num& cost,
                                          std::span<const Entry> supporters,
                                          std::span<const Num> budgets);

/// Quote minimising rho / alpha over all (alpha, rho)-affordable purchases.
/// The optimum lies on the grid {b_i / u_i} plus the full-affordability
/// price. Among equal ratios prefers larger alpha, then smaller rho.
/// nullopt when no supporter has money.
std::optional<AffordabilityQuote> bos_quote(ProjectId project, const Num& cost,
                                            std::span<const Entry> supporters,
                                            std::span<const Num> budgets);

Outcome utilitarian(const Election& election, const RuleConfig& config = {});

/// Method of Equal Shares with every voter starting at initial_endowment
/// (default budget / n). Outcomes for endowments above budget / n may be
/// infeasible; Outcome::feasible reports it.
Outcome mes(const Election& election, const RuleConfig& config = {},
            std::optional<Num> initial_endowment = std::nullopt);

/// MES with the Add1U completion.
Outcome add1u(const Election& election, const RuleConfig& config = {});

FractionalOutcome fres(const Election& election, const RuleConfig& config = {});

/// Raises W_c toward 1 by descending total utility per cost until the budget
/// is spent or everything is funded.
FractionalOutcome fres_utilitarian_completion(const Election& election, FractionalOutcome partial,
                                              const TieBreaker& tie_breaker = {});

Outcome bos(const Election& election, const RuleConfig& config = {});

Outcome bos_plus(const Election& election, const RuleConfig& config = {});

enum class RuleKind { Utilitarian, Mes, MesAdd1u, Fres, FresComplete, Bos, BosPlus };

std::string_view rule_name(RuleKind kind);
/// Throws std::invalid_argument for unknown names.
RuleKind parse_rule(std::string_view name);
/// The five rules compared in the experiments.
std::span<const RuleKind> compared_rules();
std::span<const RuleKind> all_rules();
bool is_fractional(RuleKind kind);

using RuleResult = std::variant<Outcome, FractionalOutcome>;
RuleResult run_rule(RuleKind kind, const Election& election, const RuleConfig& config = {});

/// alpha * cost - sum_i min(b_i + raise_i, alpha * u_i * rho) for a logged
/// round; zero for every correctly computed purchase.
Num affordability_residual(const Election& election, const Round& round);

/// In an overspending round strictly more than half of the payers exhaust
/// their accounts. Vacuously true for rounds without overspending.
bool overspending_majority_holds(const Round& round);

}  // namespace eqs
