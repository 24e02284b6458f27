#include "internal.hpp"

#include <array>
#include <spdlog/spdlog.h>

namespace eqs {

std::vector<std::size_t> TieBreaker::ranks(std::size_t n_projects) const {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> rank(n_projects, unset);
  std::size_t next = 0;
  for (ProjectId c : priority_) {
    if (c < n_projects && rank[c] == unset) rank[c] = next++;
  }
  for (ProjectId c = 0; c < n_projects; ++c) {
    if (rank[c] == unset) rank[c] = next++;
  }
  return rank;
}

namespace {

constexpr std::array<std::pair<RuleKind, std::string_view>, 7> kNames{{
    {RuleKind::Utilitarian, "utilitarian"},
    {RuleKind::Mes, "mes"},
    {RuleKind::MesAdd1u, "mes-add1u"},
    {RuleKind::Fres, "fres"},
    {RuleKind::FresComplete, "fres-complete"},
    {RuleKind::Bos, "bos"},
    {RuleKind::BosPlus, "bos-plus"},
}};

constexpr std::array<RuleKind, 5> kComparedRules{RuleKind::Utilitarian, RuleKind::MesAdd1u, RuleKind::FresComplete,
                                              RuleKind::Bos, RuleKind::BosPlus};
constexpr std::array<RuleKind, 7> kAllRules{RuleKind::Utilitarian, RuleKind::Mes,          RuleKind::MesAdd1u,
                                            RuleKind::Fres,        RuleKind::FresComplete, RuleKind::Bos,
                                            RuleKind::BosPlus};

}  // namespace

std::string_view rule_name(RuleKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

RuleKind parse_rule(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown rule: " + std::string(name));
}

std::span<const RuleKind> compared_rules() { return kComparedRules; }
std::span<const RuleKind> all_rules() { return kAllRules; }

bool is_fractional(RuleKind kind) { return kind == RuleKind::Fres || kind == RuleKind::FresComplete; }

RuleResult run_rule(RuleKind kind, const Election& election, const RuleConfig& config) {
  switch (kind) {
    case RuleKind::Utilitarian: return utilitarian(election, config);
    case RuleKind::Mes: return mes(election, config);
    case RuleKind::MesAdd1u: return add1u(election, config);
    case RuleKind::Fres: return fres(election, config);
    case RuleKind::FresComplete:
      return fres_utilitarian_completion(election, fres(election, config), config.tie_breaker);
    case RuleKind::Bos: return bos(election, config);
    case RuleKind::BosPlus: return bos_plus(election, config);
  }
  throw std::invalid_argument("unknown rule kind");
}

Num affordability_residual(const Election& election, const Round& round) {
  const Num wanted_per_unit = round.alpha * round.rho;
  Num raised = 0;
  for (const auto& p : round.payments) {
    Num cap = p.budget_before + p.raise;
    Num want = election.utilities().at(p.voter, round.project) * wanted_per_unit;
    raised += want < cap ? want : cap;
  }
  return round.alpha * election.cost(round.project) - raised;
}

bool overspending_majority_holds(const Round& round) {
  if (!round.has_overspending()) return true;
  return 2 * round.exhausted_count() > round.payer_count();
}

namespace detail {

void check_round(const Election& election, const Round& round, bool overspending_check) {
  if (round.completion) return;
  if (Num r = affordability_residual(election, round); r != 0) {
    throw InvariantViolation("nonzero affordability residual " + to_string(r) + " for project " +
                             election.project(round.project).name);
  }
  if (overspending_check && !overspending_majority_holds(round)) {
    throw InvariantViolation("overspending round for project " + election.project(round.project).name +
                             " exhausted only " + std::to_string(round.exhausted_count()) + " of " +
                             std::to_string(round.payer_count()) + " payers");
  }
}

void trace_round(std::string_view rule, const Election& election, const Round& round) {
  if (!spdlog::should_log(spdlog::level::debug)) return;
  spdlog::debug("{}: select {} alpha={} rho={} payers={}{}", rule, election.project(round.project).name,
                to_string(round.alpha), to_string(round.rho), round.payer_count(),
                round.completion ? " (completion)" : "");
  if (!spdlog::should_log(spdlog::level::trace)) return;
  for (const auto& p : round.payments) {
    spdlog::trace("  voter {} before={} raise={} pay={} charged={} over={}", election.voter_names()[p.voter],
                  to_string(p.budget_before), to_string(p.raise), to_string(p.payment), to_string(p.charged),
                  to_string(p.overspent));
  }
}

}  // namespace detail
}  // namespace eqs
