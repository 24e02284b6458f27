#include "eqshares/axioms.hpp"

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <stdexcept>

namespace eqs {
namespace {

Num ratio_or_zero(std::size_t count, std::size_t total) {
  return total ? Num(static_cast<long>(count)) / Num(static_cast<long>(total)) : Num(0);
}

std::vector<Num> voter_utilities(const Election& election, std::span<const ProjectId> projects, UtilityModel model) {
  std::vector<Num> out(election.n_voters(), Num(0));
  const auto& profile = election.profile(model);
  for (ProjectId c : projects) {
    for (const auto& e : profile.supporters(c)) out[e.index] += e.value;
  }
  return out;
}

void require_approval(const Election& election) {
  if (!election.is_approval()) throw std::invalid_argument("this check is defined for approval ballots only");
}

}  // namespace

Num exclusion_ratio(const Election& election, const Outcome& outcome) {
  std::vector<char> covered(election.n_voters(), 0);
  for (ProjectId c : outcome.selected) {
    for (const auto& e : election.scores().supporters(c)) covered[e.index] = 1;
  }
  return ratio_or_zero(std::count(covered.begin(), covered.end(), 0), election.n_voters());
}

Num exclusion_ratio(const Election& election, const FractionalOutcome& outcome) {
  std::vector<char> covered(election.n_voters(), 0);
  for (ProjectId c = 0; c < outcome.fractions.size(); ++c) {
    if (outcome.fractions[c] <= 0) continue;
    for (const auto& e : election.scores().supporters(c)) covered[e.index] = 1;
  }
  return ratio_or_zero(std::count(covered.begin(), covered.end(), 0), election.n_voters());
}

Num satisfaction(const Election& election, const Outcome& outcome, UtilityModel model) {
  Num sum = 0;
  for (ProjectId c : outcome.selected) sum += election.profile(model).total(c);
  return sum;
}

Num satisfaction(const Election& election, const FractionalOutcome& outcome, UtilityModel model) {
  Num sum = 0;
  for (ProjectId c = 0; c < outcome.fractions.size(); ++c) {
    if (outcome.fractions[c] != 0) sum += election.profile(model).total(c) * outcome.fractions[c];
  }
  return sum;
}

std::optional<Num> relative_to(const Num& value, const Num& reference) {
  if (reference == 0) {
    if (value == 0) return Num(1);
    return std::nullopt;
  }
  return value / reference;
}

bool is_exhaustive(const Election& election, const Outcome& outcome) {
  const Num left = election.budget() - outcome.total_cost(election);
  for (ProjectId c = 0; c < election.n_projects(); ++c) {
    if (!outcome.contains(c) && election.cost(c) <= left) return false;
  }
  return true;
}

bool is_exhaustive(const Election& election, const FractionalOutcome& outcome) {
  if (outcome.total_cost(election) == election.budget()) return true;
  return std::all_of(outcome.fractions.begin(), outcome.fractions.end(), [](const Num& f) { return f == 1; });
}

Num budget_spent_fraction(const Election& election, const Outcome& outcome) {
  return outcome.total_cost(election) / election.budget();
}

Num budget_spent_fraction(const Election& election, const FractionalOutcome& outcome) {
  return outcome.total_cost(election) / election.budget();
}

EjrPlusReport ejr_plus_violations(const Election& election, const Outcome& outcome) {
  require_approval(election);
  EjrPlusReport report;
  const std::size_t n = election.n_voters();
  if (n == 0) return report;
  const auto satisfied = voter_utilities(election, outcome.selected, UtilityModel::Cost);
  const Num share = election.budget() / Num(static_cast<long>(n));

  for (ProjectId c = 0; c < election.n_projects(); ++c) {
    if (outcome.contains(c)) continue;
    std::vector<VoterId> approvers;
    for (const auto& e : election.scores().supporters(c)) approvers.push_back(e.index);
    std::stable_sort(approvers.begin(), approvers.end(),
                     [&](VoterId a, VoterId b) { return satisfied[a] < satisfied[b]; });
    const Num& cost = election.cost(c);
    for (std::size_t s = 1; s <= approvers.size(); ++s) {
      const Num entitled = share * Num(static_cast<long>(s));
      if (entitled < cost) continue;
      if (satisfied[approvers[s - 1]] + cost <= entitled) {
        report.violations.push_back({c, std::vector<VoterId>(approvers.begin(), approvers.begin() + s)});
        ++report.count;
        break;
      }
    }
  }
  return report;
}

Num overspending_slack(const Election& election, std::size_t group_size) {
  if (group_size == 0) throw std::invalid_argument("empty group");
  Num max_cost = 0;
  for (const auto& p : election.projects()) max_cost = std::max(max_cost, p.cost);
  const Num n(static_cast<long>(election.n_voters()));
  const Num s(static_cast<long>(group_size));
  return (n - s) / (2 * s) * max_cost;
}

std::vector<EjrWitness> ejr_up_to_witnesses(const Election& election, const Outcome& outcome, const Num& slack,
                                            SearchCaps caps) {
  return ejr_up_to_witnesses(election, outcome, SlackFn([&](std::size_t) { return slack; }), caps);
}

std::vector<EjrWitness> ejr_up_to_witnesses(const Election& election, const Outcome& outcome, const SlackFn& slack,
                                            SearchCaps caps) {
  require_approval(election);
  const std::size_t n = election.n_voters();
  const std::size_t m = election.n_projects();
  if (n > caps.max_voters || m > caps.max_projects || n >= 63 || m >= 63) {
    throw std::invalid_argument("instance exceeds the exhaustive search caps");
  }
  std::vector<EjrWitness> out;
  if (n == 0) return out;
  const auto satisfied = voter_utilities(election, outcome.selected, UtilityModel::Cost);
  std::vector<std::uint64_t> approvals(n, 0);
  for (VoterId v = 0; v < n; ++v) {
    for (const auto& e : election.scores().support(v)) approvals[v] |= std::uint64_t{1} << e.index;
  }
  std::uint64_t selected_mask = 0;
  for (ProjectId c : outcome.selected) selected_mask |= std::uint64_t{1} << c;
  const Num budget = election.budget();
  const Num voters(static_cast<long>(n));

  for (std::uint64_t group = 1; group < (std::uint64_t{1} << n); ++group) {
    std::uint64_t common = (std::uint64_t{1} << m) - 1;
    std::vector<VoterId> members;
    Num best = -1;  // the most satisfied member decides
    for (VoterId v = 0; v < n; ++v) {
      if (!(group >> v & 1)) continue;
      members.push_back(v);
      common &= approvals[v];
      if (best < satisfied[v]) best = satisfied[v];
    }
    if (common == 0) continue;
    const Num size(static_cast<long>(members.size()));
    const Num t = slack(members.size());
    // Enumerate non-empty subsets of the common approvals.
    for (std::uint64_t projects = common; projects; projects = (projects - 1) & common) {
      const std::uint64_t missing = projects & ~selected_mask;
      if (!missing) continue;
      Num cost = 0;
      std::optional<ProjectId> cheapest;
      std::vector<ProjectId> listed;
      for (ProjectId c = 0; c < m; ++c) {
        if (!(projects >> c & 1)) continue;
        listed.push_back(c);
        cost += election.cost(c);
        if ((missing >> c & 1) && (!cheapest || election.cost(c) < election.cost(*cheapest))) cheapest = c;
      }
      if (size * budget < cost * voters) continue;
      if (best < cost - t - election.cost(*cheapest)) {
        out.push_back({members, std::move(listed), *cheapest, t});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const EjrWitness& a, const EjrWitness& b) {
    return a.group != b.group ? a.group < b.group : a.projects < b.projects;
  });
  return out;
}

bool is_cohesive(const Election& election, const CohesiveSpec& spec) {
  if (spec.group.empty() || spec.projects.size() != spec.beta.size() || spec.projects.size() != spec.gamma.size()) {
    return false;
  }
  Num spend = 0;
  for (std::size_t k = 0; k < spec.projects.size(); ++k) {
    if (spec.beta[k] < 0 || spec.beta[k] > 1 || spec.gamma[k] < 0) return false;
    spend += election.cost(spec.projects[k]) * spec.beta[k];
    for (VoterId v : spec.group) {
      if (election.utilities().at(v, spec.projects[k]) * spec.beta[k] < spec.gamma[k]) return false;
    }
  }
  return spend * Num(static_cast<long>(election.n_voters())) <=
         election.budget() * Num(static_cast<long>(spec.group.size()));
}

bool refutes(const Election& election, const FractionalOutcome& outcome, const CohesiveSpec& spec) {
  Num owed = 0;
  for (const auto& g : spec.gamma) owed += g;
  for (VoterId v : spec.group) {
    if (outcome_utility(election, v, outcome) >= owed) return false;
  }
  return true;
}

FalsifierReport fractional_ejr_falsifier(const Election& election, const FractionalOutcome& outcome,
                                         std::size_t trials, std::uint64_t seed) {
  FalsifierReport report;
  const std::size_t n = election.n_voters();
  const std::size_t m = election.n_projects();
  if (n == 0 || m == 0) {
    report.trials = trials;
    return report;
  }
  boost::random::mt19937_64 engine(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return boost::random::uniform_int_distribution<std::size_t>(lo, hi)(engine);
  };
  std::vector<VoterId> everyone(n);
  for (VoterId v = 0; v < n; ++v) everyone[v] = v;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    ++report.trials;
    const std::size_t size = pick(1, n);
    std::vector<VoterId> pool = everyone;
    for (std::size_t k = 0; k < size; ++k) std::swap(pool[k], pool[pick(k, n - 1)]);
    CohesiveSpec spec;
    spec.group.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(spec.group.begin(), spec.group.end());

    std::vector<ProjectId> shared;
    for (ProjectId c = 0; c < m; ++c) {
      bool all = true;
      for (VoterId v : spec.group) {
        if (election.utilities().at(v, c) == 0) {
          all = false;
          break;
        }
      }
      if (all) shared.push_back(c);
    }
    if (shared.empty()) continue;
    for (ProjectId c : shared) {
      if (pick(0, 1)) spec.projects.push_back(c);
    }
    if (spec.projects.empty()) spec.projects.push_back(shared[pick(0, shared.size() - 1)]);

    for (ProjectId c : spec.projects) {
      Num beta = make_num(static_cast<std::int64_t>(pick(1, 8)), 8);
      Num gamma;
      bool first = true;
      for (VoterId v : spec.group) {
        Num value = election.utilities().at(v, c) * beta;
        if (first || value < gamma) gamma = value;
        first = false;
      }
      spec.beta.push_back(std::move(beta));
      spec.gamma.push_back(std::move(gamma));
    }
    if (!is_cohesive(election, spec)) continue;
    ++report.cohesive_samples;
    if (refutes(election, outcome, spec)) {
      report.counterexample = std::move(spec);
      return report;
    }
  }
  return report;
}

AuditReport audit(const Election& election, const RuleResult& result, const Outcome& utilitarian_outcome) {
  AuditReport report;
  const Num util_score = satisfaction(election, utilitarian_outcome, UtilityModel::Score);
  const Num util_cost = satisfaction(election, utilitarian_outcome, UtilityModel::Cost);
  std::visit(
      [&](const auto& outcome) {
        report.score_satisfaction = satisfaction(election, outcome, UtilityModel::Score);
        report.cost_satisfaction = satisfaction(election, outcome, UtilityModel::Cost);
        report.exclusion_ratio = exclusion_ratio(election, outcome);
        report.budget_spent_fraction = budget_spent_fraction(election, outcome);
        report.exhaustive = is_exhaustive(election, outcome);
      },
      result);
  report.relative_score_satisfaction = relative_to(report.score_satisfaction, util_score);
  report.relative_cost_satisfaction = relative_to(report.cost_satisfaction, util_cost);
  if (const auto* integral = std::get_if<Outcome>(&result); integral && election.is_approval()) {
    report.ejr_plus_violations = ejr_plus_violations(election, *integral).count;
  }
  return report;
}

}  // namespace eqs
