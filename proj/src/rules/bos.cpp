#include "internal.hpp"

#include <spdlog/spdlog.h>

namespace eqs {
namespace {

struct Run {
  const Election& election;
  const RuleConfig& config;
  std::vector<std::size_t> rank;
  std::vector<Num> budgets;
  std::vector<char> selected;
  Num spent = 0;

  Run(const Election& e, const RuleConfig& c)
      : election(e),
        config(c),
        rank(c.tie_breaker.ranks(e.n_projects())),
        budgets(e.n_voters(), e.n_voters() ? e.budget() / e.n_voters() : Num(0)),
        selected(e.n_projects(), 0) {}

  // Unselected projects that fit the remaining budget.
  std::vector<ProjectId> fitting() const {
    std::vector<ProjectId> out;
    const Num left = election.budget() - spent;
    for (ProjectId c = 0; c < election.n_projects(); ++c) {
      if (!selected[c] && election.cost(c) <= left) out.push_back(c);
    }
    return out;
  }

  std::optional<AffordabilityQuote> best_bos(std::span<const ProjectId> candidates) const {
    return detail::best_quote(election, candidates, budgets, rank, detail::QuoteKind::Bos, [&](ProjectId c) {
      return bos_quote(c, election.cost(c), election.utilities().supporters(c), budgets);
    });
  }

  // BOS charging: the account pays u * rho or whatever is left.
  Round charge_bos(const AffordabilityQuote& q) {
    Round round;
    round.project = q.project;
    round.alpha = q.alpha;
    round.rho = q.rho;
    for (const auto& [voter, nominal] : q.payments) {
      Payment p;
      p.voter = voter;
      p.budget_before = budgets[voter];
      p.payment = nominal;
      Num want = election.utilities().at(voter, q.project) * q.rho;
      p.charged = want < budgets[voter] ? want : budgets[voter];
      if (nominal > p.charged) p.overspent = nominal - p.charged;
      budgets[voter] -= p.charged;
      round.payments.push_back(std::move(p));
    }
    return round;
  }

  void accept(ProjectId c) {
    selected[c] = 1;
    spent += election.cost(c);
  }
};

// Voters whose every supported project is selected leave; their money is
// split equally among the voters that remain.
void redistribute(const Election& election, const std::vector<char>& selected, std::vector<Num>& budgets,
                  std::vector<char>& active) {
  Num pool = 0;
  for (VoterId v = 0; v < election.n_voters(); ++v) {
    if (!active[v]) continue;
    bool done = true;
    for (const auto& e : election.utilities().support(v)) {
      if (!selected[e.index]) {
        done = false;
        break;
      }
    }
    if (!done) continue;
    active[v] = 0;
    pool += budgets[v];
    budgets[v] = 0;
  }
  if (pool == 0) return;
  std::size_t remaining = 0;
  for (char a : active) remaining += a ? 1 : 0;
  if (remaining == 0) return;
  Num share = pool / remaining;
  for (VoterId v = 0; v < election.n_voters(); ++v) {
    if (active[v]) budgets[v] += share;
  }
}

bool overspending_checked(const Election& election) {
  return election.model() == UtilityModel::Cost && election.is_approval();
}

}  // namespace

Outcome bos(const Election& election, const RuleConfig& config) {
  Run run(election, config);
  Outcome out;
  out.rule = "bos";
  out.initial_endowment = run.budgets.empty() ? Num(0) : run.budgets.front();
  const bool claim_check = config.check_invariants && overspending_checked(election);
  std::vector<char> active(election.n_voters(), 1);
  if (config.exhaustive_redistribution) redistribute(election, run.selected, run.budgets, active);

  while (true) {
    auto candidates = run.fitting();
    auto q = run.best_bos(candidates);
    if (!q) break;
    Round round = run.charge_bos(*q);
    if (config.check_invariants) detail::check_round(election, round, claim_check);
    detail::trace_round("bos", election, round);
    run.accept(q->project);
    out.selected.push_back(q->project);
    out.rounds.push_back(std::move(round));
    if (config.exhaustive_redistribution) redistribute(election, run.selected, run.budgets, active);
  }
  return out;
}

Outcome bos_plus(const Election& election, const RuleConfig& config) {
  Run run(election, config);
  Outcome out;
  out.rule = "bos-plus";
  out.initial_endowment = run.budgets.empty() ? Num(0) : run.budgets.front();
  std::vector<Num> over(election.n_voters(), Num(0));

  while (true) {
    auto candidates = run.fitting();
    auto star = run.best_bos(candidates);
    if (!star) break;

    PlusRound info;
    info.bos_project = star->project;
    info.bos_alpha = star->alpha;
    info.bos_rho = star->rho;
    info.delta_b = 0;
    if (star->alpha != 1) {
      std::size_t short_voters = 0;
      for (const auto& e : election.utilities().supporters(star->project)) {
        const Num& b = run.budgets[e.index];
        if (b > 0 && star->rho * e.value >= b) ++short_voters;
      }
      info.delta_b = (1 - star->alpha) * election.cost(star->project) / short_voters;
    }

    std::vector<Num> raise(election.n_voters(), Num(0));
    std::vector<Num> raised = run.budgets;
    if (info.delta_b > 0) {
      for (VoterId v = 0; v < election.n_voters(); ++v) {
        if (info.delta_b > over[v]) {
          raise[v] = info.delta_b - over[v];
          raised[v] += raise[v];
        }
      }
    }

    auto q = detail::best_quote(election, candidates, raised, run.rank, detail::QuoteKind::Mes, [&](ProjectId c) {
      return min_rho(c, election.cost(c), election.utilities().supporters(c), raised);
    });

    Round round;
    if (q) {
      round.project = q->project;
      round.alpha = 1;
      round.rho = q->rho;
      for (auto& [voter, pay] : q->payments) {
        Payment p;
        p.voter = voter;
        p.budget_before = run.budgets[voter];
        p.raise = raise[voter];
        p.payment = pay;
        if (pay <= run.budgets[voter]) {
          p.charged = pay;
          run.budgets[voter] -= pay;
        } else {
          p.charged = run.budgets[voter];
          p.overspent = pay - p.charged;
          over[voter] += p.overspent;
          run.budgets[voter] = 0;
        }
        round.payments.push_back(std::move(p));
      }
    } else {
      // Nothing is fully affordable even with the raise: buy the BOS choice
      // under BOS charging and book the shortfall as overspending.
      info.fallback = true;
      round = run.charge_bos(*star);
      for (const auto& p : round.payments) {
        Num want = election.utilities().at(p.voter, star->project) * star->rho;
        if (want > p.budget_before) over[p.voter] += want - p.budget_before;
      }
      spdlog::debug("bos-plus: no project affordable after raising by {}", to_string(info.delta_b));
    }
    round.plus = info;
    if (config.check_invariants) detail::check_round(election, round, false);
    detail::trace_round("bos-plus", election, round);
    run.accept(round.project);
    out.selected.push_back(round.project);
    out.rounds.push_back(std::move(round));
  }
  return out;
}

}  // namespace eqs
