#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eqshares/axioms.hpp"
#include "eqshares/rules.hpp"
#include "eqshares/pabulib.hpp"
#include "eqshares/synth.hpp"
#include "support.hpp"

#include <numeric>

using namespace eqs;
using namespace eqs::test;

namespace {

std::vector<Num> thousands(std::initializer_list<std::int64_t> values) {
  std::vector<Num> out;
  for (auto v : values) out.push_back(k(v));
  return out;
}

const Payment* payment_of(const Round& round, VoterId voter) {
  for (const auto& p : round.payments)
    if (p.voter == voter) return &p;
  return nullptr;
}

std::vector<Num> initial(const Election& e) { return std::vector<Num>(e.n_voters(), e.budget() / e.n_voters()); }

}  // namespace

TEST_CASE("tie breaker ranks listed projects first") {
  TieBreaker t({3, 1});
  auto r = t.ranks(5);
  CHECK(r == std::vector<std::size_t>{2, 1, 3, 0, 4});
  CHECK(TieBreaker().ranks(3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("rule names round trip") {
  for (RuleKind kind : all_rules()) CHECK(parse_rule(rule_name(kind)) == kind);
  CHECK_THROWS_AS(parse_rule("approval-voting"), std::invalid_argument);
  CHECK(compared_rules().size() == 5);
  CHECK(is_fractional(RuleKind::Fres));
  CHECK_FALSE(is_fractional(RuleKind::BosPlus));
}

TEST_SUITE("quotes") {
  TEST_CASE("min_rho splits equally when nobody is capped") {
    auto e = running_example();
    auto b = initial(e);
    auto a = e.project_by_name("A");
    auto q = min_rho(a, e.cost(a), e.utilities().supporters(a), b);
    REQUIRE(q);
    CHECK(q->rho == make_num(1, 6));
    CHECK(q->alpha == 1);
    for (auto& [voter, pay] : q->payments) CHECK(pay == k(50));
  }

  TEST_CASE("min_rho caps poor supporters and refuses short money") {
    auto e = running_example();
    auto b = thousands({50, 50, 50, 50, 50, 50, 100, 100, 100, 100});
    auto c = e.project_by_name("C");
    auto q = min_rho(c, e.cost(c), e.utilities().supporters(c), b);
    REQUIRE(q);
    CHECK(q->rho == make_num(1, 3));
    auto bq = e.project_by_name("B");
    CHECK_FALSE(min_rho(bq, e.cost(bq), e.utilities().supporters(bq), b));
  }

  TEST_CASE("min_rho with nobody funded") {
    auto e = running_example();
    std::vector<Num> zero(e.n_voters(), Num(0));
    CHECK_FALSE(min_rho(0, e.cost(0), e.utilities().supporters(0), zero));
    CHECK_FALSE(bos_quote(0, e.cost(0), e.utilities().supporters(0), zero));
  }

  TEST_CASE("bos_quote on the second round of the running example") {
    auto e = running_example();
    auto b = thousands({50, 50, 50, 50, 50, 50, 100, 100, 100, 100});
    auto quote = [&](const char* n) {
      auto c = e.project_by_name(n);
      return *bos_quote(c, e.cost(c), e.utilities().supporters(c), b);
    };
    auto qb = quote("B");
    CHECK(qb.alpha == make_num(5, 8));
    CHECK(qb.rho == make_num(1, 5));
    CHECK(qb.ratio() == make_num(8, 25));
    auto qc = quote("C");
    CHECK(qc.alpha == make_num(5, 6));
    CHECK(qc.rho == make_num(1, 5));
    CHECK(qc.ratio() == make_num(6, 25));
    for (auto& [voter, pay] : qc.payments) CHECK(pay == k(60));
    auto qd = quote("D");
    CHECK(qd.alpha == 1);
    CHECK(qd.rho == make_num(1, 4));
  }

  TEST_CASE("bos_quote prefers the full purchase when it is cheaper per share") {
    auto e = running_example();
    auto b = thousands({50, 0, 0, 0, 0, 50, 100, 100, 100, 40});
    auto d = e.project_by_name("D");
    auto q = *bos_quote(d, e.cost(d), e.utilities().supporters(d), b);
    CHECK(q.alpha == 1);
    CHECK(q.rho == make_num(5, 18));
    auto bq = e.project_by_name("B");
    auto qb = *bos_quote(bq, e.cost(bq), e.utilities().supporters(bq), b);
    CHECK(qb.alpha == make_num(1, 8));
    CHECK(qb.rho == 1);
  }

  TEST_CASE("bos_quote nominal payments sum to the purchased amount") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      auto e = random_cardinal(rng, 7, 5, UtilityModel::Cost);
      std::vector<Num> b(e.n_voters());
      std::uniform_int_distribution<int> money(0, 6);
      for (auto& x : b) x = make_num(money(rng), 2);
      for (ProjectId c = 0; c < e.n_projects(); ++c) {
        auto q = bos_quote(c, e.cost(c), e.utilities().supporters(c), b);
        if (!q) continue;
        Num sum = 0;
        for (auto& [v, pay] : q->payments) sum += pay * q->alpha;
        CHECK(sum == q->alpha * e.cost(c));
        CHECK(q->alpha > 0);
        CHECK(q->alpha <= 1);
      }
    }
  }
}

TEST_SUITE("running example") {
  TEST_CASE("utilitarian") {
    auto e = running_example();
    auto out = utilitarian(e);
    CHECK(names(e, out.selected) == std::vector<std::string>{"A", "B", "C"});
    for (auto& r : out.rounds) CHECK(r.completion);
  }

  TEST_CASE("mes rounds and accounts") {
    auto e = running_example();
    auto out = mes(e, {.check_invariants = true});
    CHECK(names(e, out.selected) == std::vector<std::string>{"A", "D", "E"});
    REQUIRE(out.rounds.size() == 3);
    CHECK(out.rounds[0].rho == make_num(1, 6));
    CHECK(out.rounds[1].rho == make_num(1, 4));
    CHECK(out.rounds[2].rho == make_num(5, 17));
    auto trace = budget_trace(e, out);
    CHECK(trace[0] == thousands({50, 50, 50, 50, 50, 50, 100, 100, 100, 100}));
    CHECK(trace[1] == thousands({50, 50, 50, 50, 50, 50, 40, 40, 40, 40}));
    CHECK(trace[2] == thousands({50, 0, 50, 50, 50, 50, 0, 0, 0, 40}));
    CHECK(out.total_cost(e) == k(710));
  }

  TEST_CASE("fres purchases with the walk-through tie order") {
    auto e = running_example();
    RuleConfig cfg;
    cfg.tie_breaker = order(e, {"A", "C", "D", "E", "F", "B"});
    auto out = fres(e, cfg);
    struct Step {
      const char* project;
      Num fraction, rho;
    };
    const std::vector<Step> expected = {
        {"A", 1, make_num(1, 6)},          {"C", make_num(5, 6), make_num(1, 5)},
        {"D", make_num(5, 6), make_num(1, 4)}, {"D", make_num(1, 6), make_num(1, 3)},
        {"E", make_num(11, 17), make_num(1, 3)}, {"F", make_num(1, 2), 1},
    };
    REQUIRE(out.purchases.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CAPTURE(i);
      CHECK(e.project(out.purchases[i].project).name == expected[i].project);
      CHECK(out.purchases[i].fraction == expected[i].fraction);
      CHECK(out.purchases[i].rho == expected[i].rho);
    }
    const std::vector<Num> fractions = {1, 0, make_num(5, 6), 1, make_num(11, 17), make_num(1, 2)};
    CHECK(out.fractions == fractions);

    std::vector<Num> b = initial(e);
    for (auto& p : out.purchases)
      for (auto& pay : p.payments) b[pay.voter] -= pay.charged;
    CHECK(b == thousands({50, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
    CHECK(out.total_cost(e) == k(950));
  }

  TEST_CASE("fres default ties favour the lower id") {
    auto e = running_example();
    auto out = fres(e);
    REQUIRE(out.purchases.size() >= 2);
    CHECK(e.project(out.purchases[1].project).name == "B");
    CHECK(out.purchases[1].fraction == make_num(5, 8));
  }

  TEST_CASE("bos rounds, overspending and accounts") {
    auto e = running_example();
    auto out = bos(e, {.check_invariants = true});
    CHECK(names(e, out.selected) == std::vector<std::string>{"A", "C", "D", "F"});
    REQUIRE(out.rounds.size() == 4);
    CHECK(out.rounds[0].alpha == 1);
    CHECK(out.rounds[0].rho == make_num(1, 6));
    CHECK(out.rounds[1].alpha == make_num(5, 6));
    CHECK(out.rounds[1].rho == make_num(1, 5));
    CHECK(out.rounds[2].alpha == 1);
    CHECK(out.rounds[2].rho == make_num(5, 18));
    CHECK(out.rounds[3].alpha == make_num(5, 6));
    CHECK(out.rounds[3].rho == make_num(3, 5));

    for (VoterId v = 1; v <= 4; ++v) {
      auto p = payment_of(out.rounds[1], v);
      REQUIRE(p);
      CHECK(p->payment == k(60));
      CHECK(p->charged == k(50));
      CHECK(p->overspent == k(10));
    }
    CHECK(payment_of(out.rounds[1], 9)->charged == k(60));
    CHECK(out.rounds[1].has_overspending());
    CHECK(overspending_majority_holds(out.rounds[1]));

    auto trace = budget_trace(e, out);
    CHECK(trace[1] == thousands({50, 0, 0, 0, 0, 50, 100, 100, 100, 40}));
    const Num third = Num(k(100)) / 3;
    CHECK(trace[2] == std::vector<Num>{k(50), 0, 0, 0, 0, k(50), third, third, third, 0});
    CHECK(trace[3] == std::vector<Num>{k(50), 0, 0, 0, 0, 0, third, third, 0, 0});
    CHECK(e.budget() - out.total_cost(e) == k(60));
  }

  TEST_CASE("bos plus agrees on the running example") {
    auto e = running_example();
    auto out = bos_plus(e, {.check_invariants = true});
    CHECK(sorted_names(e, out.selected) == std::vector<std::string>{"A", "C", "D", "F"});
  }

  TEST_CASE("add1u is feasible and contains mes") {
    auto e = running_example();
    auto out = add1u(e, {.check_invariants = true});
    CHECK(out.feasible);
    CHECK(out.total_cost(e) <= e.budget());
    CHECK(out.initial_endowment >= e.budget() / e.n_voters());
    CHECK(is_exhaustive(e, out));
  }
}

TEST_SUITE("case studies") {
  TEST_CASE("one large unanimous-ish project against a small one") {
    auto e = helenka();
    CHECK(names(e, mes(e).selected) == std::vector<std::string>{"B"});
    CHECK(names(e, add1u(e).selected) == std::vector<std::string>{"B"});
    CHECK(names(e, bos(e, {.check_invariants = true}).selected) == std::vector<std::string>{"A"});
    auto plus = bos_plus(e, {.check_invariants = true});
    CHECK(names(e, plus.selected) == std::vector<std::string>{"A"});
    REQUIRE(plus.rounds.size() == 1);
    REQUIRE(plus.rounds[0].plus);
    CHECK(plus.rounds[0].rho == make_num(1, 403));
    CHECK(plus.rounds[0].alpha == 1);
    CHECK(plus.rounds[0].plus->bos_alpha == make_num(403, 414));
  }

  TEST_CASE("fixture file matches the built instance") {
    auto loaded = load_election(fixture("helenka.pb"), UtilityModel::Cost);
    auto built = helenka();
    CHECK(loaded.n_voters() == built.n_voters());
    CHECK(loaded.utilities() == built.utilities());
    CHECK(loaded.budget() == built.budget());
  }

  TEST_CASE("heavy tail of scores") {
    auto e = tail_utilities();
    CHECK(names(e, mes(e).selected) == std::vector<std::string>{"B"});
    CHECK(names(e, bos(e).selected) == std::vector<std::string>{"A"});
    auto b = initial(e);
    auto qa = min_rho(0, e.cost(0), e.utilities().supporters(0), b);
    auto qb = min_rho(1, e.cost(1), e.utilities().supporters(1), b);
    CHECK(qa->rho == make_num(1, 100));
    CHECK(qb->rho == make_num(1, 200));
  }

  TEST_CASE("popular block against many singletons") {
    auto e = unpopular();
    auto count_a = [&](const Outcome& o) {
      return std::count_if(o.selected.begin(), o.selected.end(), [&](ProjectId c) { return e.project(c).name[0] == 'A'; });
    };
    auto m = mes(e);
    CHECK(m.selected.size() == 7);
    CHECK(count_a(m) == 7);
    auto a = add1u(e);
    CHECK(a.selected.size() == 10);
    CHECK(count_a(a) == 10);
    std::size_t tail = std::count_if(a.rounds.begin(), a.rounds.end(), [](const Round& r) { return r.completion; });
    CHECK(tail == 3);
    auto b = bos(e, {.check_invariants = true});
    CHECK(b.selected.size() == 10);
    CHECK(count_a(b) == 7);
    auto p = bos_plus(e, {.check_invariants = true});
    CHECK(p.selected.size() == 10);
    CHECK(count_a(p) == 10);
  }
}

TEST_CASE("golden ratio threshold for one full-budget project") {
  for (std::int64_t n : {20, 100}) {
    for (std::int64_t x = 1; x < n; ++x) {
      auto e = helenka(x, n - x, make_num(n), 1, make_num(n));
      const bool big_wins = x * x > n * (n - x);
      CAPTURE(n);
      CAPTURE(x);
      CHECK(bos(e).contains(0) == big_wins);
    }
  }
}

TEST_CASE("hard instance family defeats the private group") {
  for (std::size_t ell : {1, 2}) {
    auto inst = gen_prop_one(ell);
    const auto& e = inst.election;
    CHECK(e.n_voters() == 4 * ell * ell + ell);
    CHECK(e.n_projects() == 4 * ell * ell + 2 * ell);
    auto b = initial(e);
    for (auto c : inst.group1) CHECK(min_rho(c, e.cost(c), e.utilities().supporters(c), b)->rho == make_num(1, ell));
    for (auto c : inst.group2)
      CHECK(min_rho(c, e.cost(c), e.utilities().supporters(c), b)->rho == make_num(1, 4 * ell * ell));
    for (auto c : inst.group3) CHECK(min_rho(c, e.cost(c), e.utilities().supporters(c), b)->rho == make_num(1, 2 * ell));

    RuleConfig cfg{.tie_breaker = inst.tie_breaker, .check_invariants = true};
    std::vector<ProjectId> expected = inst.group2;
    expected.insert(expected.end(), inst.group3.begin(), inst.group3.end());
    std::sort(expected.begin(), expected.end());
    for (auto out : {bos(e, cfg), bos_plus(e, cfg)}) {
      std::sort(out.selected.begin(), out.selected.end());
      CHECK(out.selected == expected);
    }
  }
}

TEST_CASE("exhaustive redistribution hands idle money on") {
  // v0 only likes X, which is bought first; v0's leftover then helps Y.
  ElectionBuilder b;
  b.budget = 6;
  auto x = b.add_project("X", 1);
  auto y = b.add_project("Y", 4);
  b.add_approval_voter("v0", std::vector<ProjectId>{x});
  b.add_approval_voter("v1", std::vector<ProjectId>{x, y});
  b.add_approval_voter("v2", std::vector<ProjectId>{y});
  auto e = b.build(UtilityModel::Cost);
  auto plain = bos(e);
  auto shared = bos(e, {.exhaustive_redistribution = true});
  CHECK(shared.total_cost(e) >= plain.total_cost(e));
  CHECK(shared.contains(y));
  CHECK(is_feasible(e, shared));
  // after X, v0 holds 3/2 with nothing left to support; v1 and v2 get 3/4 each
  REQUIRE(shared.rounds.size() == 2);
  CHECK(payment_of(shared.rounds[1], 1)->budget_before == make_num(9, 4));
  CHECK(payment_of(shared.rounds[1], 2)->budget_before == make_num(11, 4));
}

TEST_SUITE("properties") {
  TEST_CASE("integral rules are feasible and charge no more than accounts hold") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 150; ++trial) {
      const bool approval = trial % 2 == 0;
      auto model = trial % 3 == 0 ? UtilityModel::Score : UtilityModel::Cost;
      auto e = approval ? random_approval(rng, 8, 6, model) : random_cardinal(rng, 8, 6, model);
      CAPTURE(trial);
      RuleConfig cfg{.check_invariants = true};
      for (auto out : {utilitarian(e, cfg), mes(e, cfg), add1u(e, cfg), bos(e, cfg), bos_plus(e, cfg)}) {
        CAPTURE(out.rule);
        CHECK(is_feasible(e, out));
        auto sorted = out.selected;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        for (const auto& r : out.rounds) {
          if (r.completion) {
            CHECK(r.payments.empty());
            continue;
          }
          CHECK(affordability_residual(e, r) == 0);
          for (const auto& p : r.payments) {
            CHECK(p.charged >= 0);
            CHECK(p.charged <= p.budget_before + p.raise);
          }
        }
        if (out.rule != "bos-plus") {
          for (const auto& balances : budget_trace(e, out))
            for (const auto& x : balances) CHECK(x >= 0);
        }
      }
    }
  }

  TEST_CASE("mes never lets a payer pay above u * rho") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
      auto e = random_cardinal(rng, 8, 6, UtilityModel::Cost);
      auto out = mes(e);
      for (const auto& r : out.rounds)
        for (const auto& p : r.payments) CHECK(p.charged <= e.utilities().at(p.voter, r.project) * r.rho);
    }
  }

  TEST_CASE("completion rules are exhaustive") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      auto e = random_cardinal(rng, 8, 6, UtilityModel::Cost);
      CHECK(is_exhaustive(e, utilitarian(e)));
      CHECK(is_exhaustive(e, add1u(e)));
      auto f = fres_utilitarian_completion(e, fres(e));
      CHECK(is_exhaustive(e, f));
    }
  }

  TEST_CASE("fres fractions stay in range and charges match purchases") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 150; ++trial) {
      auto e = random_cardinal(rng, 8, 6, trial % 2 ? UtilityModel::Cost : UtilityModel::Score);
      auto out = fres(e);
      Num bought = 0;
      for (ProjectId c = 0; c < e.n_projects(); ++c) {
        CHECK(out.fractions[c] >= 0);
        CHECK(out.fractions[c] <= 1);
        bought += out.fractions[c] * e.cost(c);
      }
      CHECK(bought == out.total_charged());
      CHECK(bought <= e.budget());
      std::vector<Num> b = initial(e);
      for (auto& p : out.purchases) {
        Num paid = 0;
        for (auto& pay : p.payments) {
          b[pay.voter] -= pay.charged;
          paid += pay.charged;
        }
        CHECK(paid == p.fraction * e.cost(p.project));
      }
      for (auto& x : b) CHECK(x >= 0);
    }
  }

  TEST_CASE("selected sets do not depend on voter order") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 60; ++trial) {
      auto e = random_cardinal(rng, 7, 5, UtilityModel::Cost);
      std::vector<VoterId> perm(e.n_voters());
      std::iota(perm.begin(), perm.end(), VoterId{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      ElectionBuilder b;
      b.budget = e.budget();
      for (auto& p : e.projects()) b.add_project(p.name, p.cost);
      for (VoterId v : perm) {
        std::vector<std::pair<ProjectId, Num>> ballot;
        for (auto& entry : e.scores().support(v)) ballot.emplace_back(entry.index, entry.value);
        b.add_voter(std::string(e.voter_names()[v]), ballot);
      }
      auto shuffled = b.build(UtilityModel::Cost);
      CHECK(mes(e).selected == mes(shuffled).selected);
      CHECK(bos(e).selected == bos(shuffled).selected);
      CHECK(bos_plus(e).selected == bos_plus(shuffled).selected);
      CHECK(fres(e).fractions == fres(shuffled).fractions);
    }
  }

  TEST_CASE("runs are deterministic") {
    std::mt19937_64 rng(10);
    auto e = random_cardinal(rng, 8, 6, UtilityModel::Cost);
    for (RuleKind kind : all_rules()) CHECK(run_rule(kind, e) == run_rule(kind, e));
  }

  TEST_CASE("mes with a larger endowment may overshoot and says so") {
    auto e = running_example();
    auto out = mes(e, {}, k(300));
    CHECK(out.feasible == is_feasible(e, std::span<const ProjectId>(out.selected)));
    CHECK_FALSE(out.feasible);
  }
}
