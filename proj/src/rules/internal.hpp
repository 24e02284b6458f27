#pragma once

#include "eqshares/rules.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace eqs::detail {

/// Sum of utilities over supporters that still hold money. Zero means the
/// project cannot be quoted at all.
inline Num funded_support(std::span<const Entry> supporters, std::span<const Num> budgets) {
  Num sum = 0;
  for (const auto& e : supporters) {
    if (budgets[e.index] > 0) sum += e.value;
  }
  return sum;
}

enum class QuoteKind { Mes, Bos };

/// Floating-point estimate of the quote's rho / alpha from (budget, utility)
/// pairs of funded supporters; infinity when the money looks short. All sums
/// run over positive terms, so the relative error stays far below
/// kEstimateMargin for any realistic electorate.
double estimate_ratio(QuoteKind kind, double cost, std::vector<std::pair<double, double>>& holders);
inline constexpr double kEstimateMargin = 1e-6;

/// Picks the quote with the smallest rho / alpha, ties by rank. Candidates are
/// visited in order of a lower bound on their ratio: the larger of cost /
/// funded utility (exact) and the shrunk floating-point estimate. The search
/// stops once the bound cannot beat the incumbent; every comparison between
/// actual quotes is exact.
template <class QuoteFn>
std::optional<AffordabilityQuote> best_quote(const Election& election, std::span<const ProjectId> candidates,
                                             std::span<const Num> budgets,
                                             const std::vector<std::size_t>& rank, QuoteKind kind,
                                             QuoteFn&& quote) {
  struct Bound {
    ProjectId project;
    Num value;
  };
  std::vector<Bound> bounds;
  bounds.reserve(candidates.size());
  std::vector<double> approx_budgets(budgets.size());
  for (std::size_t i = 0; i < budgets.size(); ++i) approx_budgets[i] = to_double(budgets[i]);
  std::vector<std::pair<double, double>> holders;
  for (ProjectId c : candidates) {
    const auto supporters = election.utilities().supporters(c);
    Num support = funded_support(supporters, budgets);
    if (support == 0) continue;
    Num bound = election.cost(c) / support;
    holders.clear();
    for (const auto& e : supporters) {
      if (budgets[e.index] > 0) holders.emplace_back(approx_budgets[e.index], to_double(e.value));
    }
    double estimate = estimate_ratio(kind, to_double(election.cost(c)), holders) * (1 - kEstimateMargin);
    if (std::isfinite(estimate) && estimate > 0) {
      Num shrunk = from_double(estimate);
      if (shrunk > bound) bound = std::move(shrunk);
    }
    bounds.push_back({c, std::move(bound)});
  }
  std::sort(bounds.begin(), bounds.end(), [&](const Bound& a, const Bound& b) {
    if (a.value != b.value) return a.value < b.value;
    return rank[a.project] < rank[b.project];
  });

  std::optional<AffordabilityQuote> best;
  Num best_key;
  for (const auto& bound : bounds) {
    if (best) {
      if (bound.value > best_key) break;
      if (bound.value == best_key && rank[bound.project] > rank[best->project]) break;
    }
    auto q = quote(bound.project);
    if (!q) continue;
    Num key = q->ratio();
    if (!best || key < best_key || (key == best_key && rank[q->project] < rank[best->project])) {
      best_key = std::move(key);
      best = std::move(q);
    }
  }
  return best;
}

inline std::vector<ProjectId> ordered_by_rank(std::size_t n_projects, const std::vector<std::size_t>& rank) {
  std::vector<ProjectId> order(n_projects);
  for (ProjectId c = 0; c < n_projects; ++c) order[rank[c]] = c;
  return order;
}

void check_round(const Election& election, const Round& round, bool overspending_check);

void trace_round(std::string_view rule, const Election& election, const Round& round);

}  // namespace eqs::detail
