#pragma once

#include "eqshares/election.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eqs {

/// One voter's share of a purchase.
struct Payment {
  VoterId voter = 0;
  Num budget_before;  ///< account before the round
  Num raise;          ///< temporary BOS+ increase applied for this round
  Num payment;        ///< nominal share; shares of a round sum to the purchased amount
  Num charged;        ///< actually deducted from the account
  Num overspent;      ///< payment - charged when positive

  friend bool operator==(const Payment&, const Payment&) = default;
};

/// Extra bookkeeping for a BOS+ round.
struct PlusRound {
  ProjectId bos_project = 0;
  Num bos_alpha;
  Num bos_rho;
  Num delta_b;
  bool fallback = false;  ///< no project was (1, rho)-affordable under the raised budgets

  friend bool operator==(const PlusRound&, const PlusRound&) = default;
};

struct Round {
  ProjectId project = 0;
  Num alpha;  ///< 1 for MES-style purchases
  Num rho;
  std::vector<Payment> payments;
  std::optional<PlusRound> plus;
  bool completion = false;  ///< added by a greedy completion, no payments

  std::size_t payer_count() const;
  /// Payers whose account reached zero this round.
  std::size_t exhausted_count() const;
  bool has_overspending() const;

  friend bool operator==(const Round&, const Round&) = default;
};

/// Integral outcome with its full round log.
struct Outcome {
  std::string rule;
  std::vector<ProjectId> selected;  ///< in selection order
  std::vector<Round> rounds;
  Num initial_endowment;
  bool feasible = true;

  bool contains(ProjectId id) const;
  Num total_cost(const Election& election) const;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Purchase {
  ProjectId project = 0;
  Num fraction;  ///< increment of W_c
  Num rho;
  std::vector<Payment> payments;  ///< empty for completion purchases
  bool completion = false;

  friend bool operator==(const Purchase&, const Purchase&) = default;
};

/// W_c in [0, 1] for every project plus the purchase log.
struct FractionalOutcome {
  std::string rule;
  std::vector<Num> fractions;
  std::vector<Purchase> purchases;
  Num initial_endowment;

  Num total_cost(const Election& election) const;
  /// Sum of all charges in the purchase log.
  Num total_charged() const;

  friend bool operator==(const FractionalOutcome&, const FractionalOutcome&) = default;
};

/// Per-voter accounts during one rule evaluation.
struct BudgetState {
  std::vector<Num> remaining;
  std::vector<Num> overspent;  ///< BOS+ ledger; zero for the other rules

  BudgetState() = default;
  BudgetState(std::size_t n_voters, const Num& initial)
      : remaining(n_voters, initial), overspent(n_voters, Num(0)) {}
};

/// u_i(W) = sum of u_i(c) over c in W, using the election's utility model.
Num outcome_utility(const Election& election, VoterId voter, const Outcome& outcome);
/// sum of u_i(c) * W_c.
Num outcome_utility(const Election& election, VoterId voter, const FractionalOutcome& outcome);
Num outcome_utility(const Election& election, VoterId voter, std::span<const ProjectId> projects);

bool is_feasible(const Election& election, std::span<const ProjectId> projects);
bool is_feasible(const Election& election, const Outcome& outcome);
bool is_feasible(const Election& election, const FractionalOutcome& outcome);

/// Account balances after each round, reconstructed from the payment log.
std::vector<std::vector<Num>> budget_trace(const Election& election, const Outcome& outcome);

}  // namespace eqs
