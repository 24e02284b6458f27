#include "internal.hpp"

#include <spdlog/spdlog.h>

namespace eqs {

FractionalOutcome fres(const Election& election, const RuleConfig& config) {
  const std::size_t n = election.n_voters();
  const std::size_t m = election.n_projects();
  const auto& util = election.utilities();
  const auto rank = config.tie_breaker.ranks(m);

  FractionalOutcome out;
  out.rule = "fres";
  out.fractions.assign(m, Num(0));
  out.initial_endowment = n ? election.budget() / n : Num(0);

  std::vector<Num> budgets(n, out.initial_endowment);
  std::vector<char> active(n, n ? out.initial_endowment > 0 : 0);
  // Utility of each project summed over voters that still hold money.
  std::vector<Num> support(m, Num(0));
  for (ProjectId c = 0; c < m; ++c) {
    for (const auto& e : util.supporters(c)) {
      if (active[e.index]) support[c] += e.value;
    }
  }

  while (true) {
    std::optional<ProjectId> pick;
    Num best_rho;
    for (ProjectId c = 0; c < m; ++c) {
      if (out.fractions[c] == 1 || support[c] == 0) continue;
      Num rho = election.cost(c) / support[c];
      if (!pick || rho < best_rho || (rho == best_rho && rank[c] < rank[*pick])) {
        pick = c;
        best_rho = std::move(rho);
      }
    }
    if (!pick) break;
    const ProjectId c = *pick;

    Num alpha = 1 - out.fractions[c];
    for (const auto& e : util.supporters(c)) {
      if (!active[e.index]) continue;
      Num cap = budgets[e.index] / (best_rho * e.value);
      if (cap < alpha) alpha = std::move(cap);
    }

    Purchase purchase;
    purchase.project = c;
    purchase.fraction = alpha;
    purchase.rho = best_rho;
    std::vector<VoterId> drained;
    for (const auto& e : util.supporters(c)) {
      if (!active[e.index]) continue;
      Payment p;
      p.voter = e.index;
      p.budget_before = budgets[e.index];
      p.payment = alpha * best_rho * e.value;
      p.charged = p.payment;
      budgets[e.index] -= p.charged;
      if (budgets[e.index] == 0) drained.push_back(e.index);
      purchase.payments.push_back(std::move(p));
    }
    out.fractions[c] += alpha;
    for (VoterId v : drained) {
      active[v] = 0;
      for (const auto& e : util.support(v)) support[e.index] -= e.value;
    }
    if (config.check_invariants) {
      Num charged = 0;
      for (const auto& p : purchase.payments) charged += p.charged;
      if (charged != alpha * election.cost(c)) {
        throw InvariantViolation("fractional purchase of " + election.project(c).name + " is not fully paid");
      }
    }
    spdlog::debug("fres: buy {} of {} at rho={}", to_string(alpha), election.project(c).name, to_string(best_rho));
    out.purchases.push_back(std::move(purchase));
  }
  return out;
}

FractionalOutcome fres_utilitarian_completion(const Election& election, FractionalOutcome partial,
                                              const TieBreaker& tie_breaker) {
  const std::size_t m = election.n_projects();
  if (partial.fractions.size() != m) throw std::invalid_argument("fractional outcome does not match the election");
  const auto rank = tie_breaker.ranks(m);
  partial.rule = partial.rule.empty() ? "fres-complete" : partial.rule + "-complete";

  std::vector<ProjectId> order;
  std::vector<Num> value(m);
  for (ProjectId c = 0; c < m; ++c) {
    if (partial.fractions[c] == 1) continue;
    order.push_back(c);
    value[c] = election.utilities().total(c) / election.cost(c);
  }
  std::sort(order.begin(), order.end(), [&](ProjectId a, ProjectId b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return rank[a] < rank[b];
  });

  Num left = election.budget() - partial.total_cost(election);
  for (ProjectId c : order) {
    if (left <= 0) break;
    Num add = 1 - partial.fractions[c];
    Num affordable = left / election.cost(c);
    if (affordable < add) add = std::move(affordable);
    partial.fractions[c] += add;
    left -= add * election.cost(c);
    Purchase purchase;
    purchase.project = c;
    purchase.fraction = std::move(add);
    purchase.completion = true;
    partial.purchases.push_back(std::move(purchase));
  }
  return partial;
}

}  // namespace eqs
