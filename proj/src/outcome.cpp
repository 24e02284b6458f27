#include "eqshares/outcome.hpp"

#include <algorithm>

namespace eqs {

std::size_t Round::payer_count() const { return payments.size(); }

std::size_t Round::exhausted_count() const {
  return static_cast<std::size_t>(std::count_if(payments.begin(), payments.end(), [](const Payment& p) {
    return p.charged == p.budget_before;
  }));
}

bool Round::has_overspending() const {
  return std::any_of(payments.begin(), payments.end(), [](const Payment& p) { return p.overspent > 0; });
}

bool Outcome::contains(ProjectId id) const {
  return std::find(selected.begin(), selected.end(), id) != selected.end();
}

Num Outcome::total_cost(const Election& election) const {
  Num sum = 0;
  for (ProjectId c : selected) sum += election.cost(c);
  return sum;
}

Num FractionalOutcome::total_cost(const Election& election) const {
  Num sum = 0;
  for (ProjectId c = 0; c < fractions.size(); ++c) sum += fractions[c] * election.cost(c);
  return sum;
}

Num FractionalOutcome::total_charged() const {
  Num sum = 0;
  for (const auto& purchase : purchases) {
    for (const auto& p : purchase.payments) sum += p.charged;
  }
  return sum;
}

Num outcome_utility(const Election& election, VoterId voter, std::span<const ProjectId> projects) {
  Num sum = 0;
  for (ProjectId c : projects) sum += election.utilities().at(voter, c);
  return sum;
}

Num outcome_utility(const Election& election, VoterId voter, const Outcome& outcome) {
  return outcome_utility(election, voter, outcome.selected);
}

Num outcome_utility(const Election& election, VoterId voter, const FractionalOutcome& outcome) {
  Num sum = 0;
  for (const auto& e : election.utilities().support(voter)) {
    if (e.index < outcome.fractions.size()) sum += e.value * outcome.fractions[e.index];
  }
  return sum;
}

bool is_feasible(const Election& election, std::span<const ProjectId> projects) {
  Num sum = 0;
  for (ProjectId c : projects) sum += election.cost(c);
  return sum <= election.budget();
}

bool is_feasible(const Election& election, const Outcome& outcome) {
  return is_feasible(election, outcome.selected);
}

bool is_feasible(const Election& election, const FractionalOutcome& outcome) {
  for (const auto& f : outcome.fractions) {
    if (f < 0 || f > 1) return false;
  }
  return outcome.total_cost(election) <= election.budget();
}

std::vector<std::vector<Num>> budget_trace(const Election& election, const Outcome& outcome) {
  std::vector<std::vector<Num>> trace;
  std::vector<Num> budgets(election.n_voters(), outcome.initial_endowment);
  for (const auto& round : outcome.rounds) {
    for (const auto& p : round.payments) budgets[p.voter] -= p.charged;
    trace.push_back(budgets);
  }
  return trace;
}

}  // namespace eqs
