#include "internal.hpp"

#include <limits>

namespace eqs {
namespace {

struct Holder {
  VoterId voter;
  const Num* utility;
  const Num* budget;
  Num cap;  // b / u: the price at which this voter runs out of money
};

std::vector<Holder> funded_holders(std::span<const Entry> supporters, std::span<const Num> budgets,
                                   Num& money, Num& utility) {
  std::vector<Holder> out;
  out.reserve(supporters.size());
  money = 0;
  utility = 0;
  for (const auto& e : supporters) {
    const Num& b = budgets[e.index];
    if (b <= 0) continue;
    out.push_back({e.index, &e.value, &b, b / e.value});
    money += b;
    utility += e.value;
  }
  std::sort(out.begin(), out.end(), [](const Holder& a, const Holder& b) {
    if (a.cap != b.cap) return a.cap < b.cap;
    return a.voter < b.voter;
  });
  return out;
}

// Smallest rho with cost = sum min(b, u * rho). Requires money >= cost.
Num full_price(const std::vector<Holder>& holders, const Num& cost, Num utility) {
  Num paid = 0;
  for (const auto& h : holders) {
    Num rho = (cost - paid) / utility;
    if (rho <= h.cap) return rho;
    paid += *h.budget;
    utility -= *h.utility;
  }
  // Only reachable through rounding, which exact arithmetic rules out.
  throw std::logic_error("full_price called without enough money");
}

}  // namespace

namespace detail {

double estimate_ratio(QuoteKind kind, double cost, std::vector<std::pair<double, double>>& holders) {
  const auto inf = std::numeric_limits<double>::infinity();
  if (holders.empty() || !(cost > 0)) return inf;
  std::sort(holders.begin(), holders.end(), [](const auto& a, const auto& b) {
    return a.first * b.second < b.first * a.second;
  });
  const std::size_t n = holders.size();
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + holders[i].second;
  double money = 0;
  for (const auto& h : holders) money += h.first;

  auto price = [&]() {
    double paid = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double rho = (cost - paid) / suffix[i];
      if (rho <= holders[i].first / holders[i].second) return rho;
      paid += holders[i].first;
    }
    return (cost - paid) / suffix[n - 1];
  };

  if (kind == QuoteKind::Mes) return money < cost ? inf : price();

  double best = inf;
  double prefix = 0;
  for (std::size_t k = 0; k < n;) {
    const double lambda = holders[k].first / holders[k].second;
    std::size_t j = k;
    for (; j < n && holders[j].first / holders[j].second == lambda; ++j) prefix += holders[j].first;
    const double raised = prefix + lambda * suffix[j];
    if (raised >= cost) break;
    const double alpha = raised / cost;
    best = std::min(best, lambda / (alpha * alpha));
    k = j;
  }
  if (money >= cost) best = std::min(best, price());
  return best;
}

}  // namespace detail

std::optional<AffordabilityQuote> min_rho(ProjectId project, const Num& cost,
                                          std::span<const Entry> supporters,
                                          std::span<const Num> budgets) {
  Num money, utility;
  auto holders = funded_holders(supporters, budgets, money, utility);
  if (holders.empty() || money < cost) return std::nullopt;

  AffordabilityQuote q;
  q.project = project;
  q.alpha = 1;
  q.rho = full_price(holders, cost, utility);
  q.payments.reserve(holders.size());
  for (const auto& h : supporters) {
    const Num& b = budgets[h.index];
    if (b <= 0) continue;
    Num want = h.value * q.rho;
    q.payments.emplace_back(h.index, want < b ? want : b);
  }
  return q;
}

std::optional<AffordabilityQuote> bos_quote(ProjectId project, const Num& cost,
                                            std::span<const Entry> supporters,
                                            std::span<const Num> budgets) {
  Num money, utility;
  auto holders = funded_holders(supporters, budgets, money, utility);
  if (holders.empty()) return std::nullopt;

  bool found = false;
  Num best_alpha, best_rho, best_ratio;
  auto consider = [&](Num alpha, Num rho) {
    Num ratio = rho / alpha;
    bool better = !found || ratio < best_ratio ||
                  (ratio == best_ratio && (alpha > best_alpha || (alpha == best_alpha && rho < best_rho)));
    if (!better) return;
    found = true;
    best_alpha = std::move(alpha);
    best_rho = std::move(rho);
    best_ratio = std::move(ratio);
  };

  // Grid points lambda = b_j / u_j below the full-affordability price. At
  // lambda, voters with cap <= lambda pay their whole budget and the rest pay
  // u * lambda.
  Num prefix_money = 0;
  Num suffix_utility = utility;
  for (std::size_t k = 0; k < holders.size();) {
    const Num& lambda = holders[k].cap;
    std::size_t j = k;
    for (; j < holders.size() && holders[j].cap == lambda; ++j) {
      prefix_money += *holders[j].budget;
      suffix_utility -= *holders[j].utility;
    }
    Num raised = prefix_money + lambda * suffix_utility;
    if (raised >= cost) break;  // this and every later point is dominated by the full price
    Num alpha = raised / cost;
    consider(alpha, lambda / alpha);
    k = j;
  }
  if (money >= cost) consider(Num(1), full_price(holders, cost, utility));

  AffordabilityQuote q;
  q.project = project;
  q.alpha = best_alpha;
  q.rho = best_rho;
  const Num lambda = best_alpha * best_rho;
  q.payments.reserve(holders.size());
  for (const auto& e : supporters) {
    const Num& b = budgets[e.index];
    if (b <= 0) continue;
    Num want = e.value * lambda;
    q.payments.emplace_back(e.index, (want < b ? want : b) / best_alpha);
  }
  return q;
}

}  // namespace eqs
