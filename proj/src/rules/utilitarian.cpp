#include "internal.hpp"

namespace eqs {

Outcome utilitarian(const Election& election, const RuleConfig& config) {
  const auto rank = config.tie_breaker.ranks(election.n_projects());
  std::vector<Num> totals(election.n_projects());
  for (ProjectId c = 0; c < election.n_projects(); ++c) totals[c] = election.scores().total(c);

  std::vector<ProjectId> order(election.n_projects());
  for (ProjectId c = 0; c < order.size(); ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](ProjectId a, ProjectId b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return rank[a] < rank[b];
  });

  Outcome out;
  out.rule = "utilitarian";
  out.initial_endowment = election.n_voters() ? election.budget() / election.n_voters() : Num(0);
  Num left = election.budget();
  for (ProjectId c : order) {
    if (election.cost(c) > left) continue;
    left -= election.cost(c);
    out.selected.push_back(c);
    Round round;
    round.project = c;
    round.alpha = 1;
    round.completion = true;
    out.rounds.push_back(std::move(round));
  }
  return out;
}

}  // namespace eqs
