#include "internal.hpp"

#include <spdlog/spdlog.h>

namespace eqs {
namespace {

Num equal_share(const Election& election) {
  return election.n_voters() ? election.budget() / election.n_voters() : Num(0);
}

// abort_over_budget lets the Add1U probe stop once the outcome is known to be
// infeasible; the partial result is still flagged infeasible.
Outcome run_mes(const Election& election, const RuleConfig& config, const Num& endowment, bool abort_over_budget) {
  const auto rank = config.tie_breaker.ranks(election.n_projects());
  std::vector<Num> budgets(election.n_voters(), endowment);
  std::vector<ProjectId> open(election.n_projects());
  for (ProjectId c = 0; c < open.size(); ++c) open[c] = c;

  Outcome out;
  out.rule = "mes";
  out.initial_endowment = endowment;
  Num spent = 0;
  while (!open.empty()) {
    auto q = detail::best_quote(election, open, budgets, rank, detail::QuoteKind::Mes, [&](ProjectId c) {
      return min_rho(c, election.cost(c), election.utilities().supporters(c), budgets);
    });
    if (!q) break;

    Round round;
    round.project = q->project;
    round.alpha = 1;
    round.rho = q->rho;
    round.payments.reserve(q->payments.size());
    for (auto& [voter, pay] : q->payments) {
      Payment p;
      p.voter = voter;
      p.budget_before = budgets[voter];
      p.charged = pay;
      p.payment = std::move(pay);
      budgets[voter] -= p.charged;
      round.payments.push_back(std::move(p));
    }
    if (config.check_invariants) detail::check_round(election, round, false);
    detail::trace_round("mes", election, round);

    out.selected.push_back(q->project);
    out.rounds.push_back(std::move(round));
    std::erase(open, q->project);
    spent += election.cost(q->project);
    if (spent > election.budget()) {
      out.feasible = false;
      if (abort_over_budget) break;
    }
  }
  return out;
}

}  // namespace

Outcome mes(const Election& election, const RuleConfig& config, std::optional<Num> initial_endowment) {
  const Num endowment = initial_endowment ? *initial_endowment : equal_share(election);
  if (endowment < 0) throw std::invalid_argument("initial endowment must be non-negative");
  return run_mes(election, config, endowment, false);
}

Outcome add1u(const Election& election, const RuleConfig& config) {
  if (config.add1u_step <= 0) throw std::invalid_argument("add1u step must be positive");
  const Num base = equal_share(election);
  Outcome best = run_mes(election, config, base, false);

  if (election.n_voters() > 0) {
    const Int steps = ceil((election.budget() - base) / config.add1u_step);
    // With every supported project jointly affordable no probe can fail, so
    // the scan ends at its last endowment; evaluate that one directly.
    Num supported_cost = 0;
    for (ProjectId c = 0; c < election.n_projects(); ++c) {
      if (!election.utilities().supporters(c).empty()) supported_cost += election.cost(c);
    }
    Int k = supported_cost <= election.budget() && steps > 0 ? steps : Int(1);
    for (; k <= steps; ++k) {
      Outcome probe = run_mes(election, config, base + Num(k) * config.add1u_step, true);
      if (!probe.feasible) {
        spdlog::debug("mes-add1u: endowment {} infeasible, keeping {}", to_string(probe.initial_endowment),
                      to_string(best.initial_endowment));
        break;
      }
      best = std::move(probe);
    }
  }
  best.rule = "mes-add1u";

  const auto rank = config.tie_breaker.ranks(election.n_projects());
  std::vector<ProjectId> rest;
  std::vector<Num> totals(election.n_projects());
  for (ProjectId c = 0; c < election.n_projects(); ++c) {
    if (best.contains(c)) continue;
    rest.push_back(c);
    totals[c] = election.scores().total(c);
  }
  std::sort(rest.begin(), rest.end(), [&](ProjectId a, ProjectId b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return rank[a] < rank[b];
  });
  Num left = election.budget() - best.total_cost(election);
  for (ProjectId c : rest) {
    if (election.cost(c) > left) continue;
    left -= election.cost(c);
    best.selected.push_back(c);
    Round round;
    round.project = c;
    round.alpha = 1;
    round.completion = true;
    detail::trace_round("mes-add1u", election, round);
    best.rounds.push_back(std::move(round));
  }
  return best;
}

}  // namespace eqs
