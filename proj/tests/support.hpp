#pragma once

#include "eqshares/election.hpp"
#include "eqshares/rules.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace eqs::test {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(EQS_FIXTURE_DIR) / name; }

inline Num k(std::int64_t thousands) { return make_num(thousands * 1000); }

// Ten voters, six projects, budget 1,000,000.
inline Election running_example(UtilityModel model = UtilityModel::Cost) {
  ElectionBuilder b;
  b.budget = make_num(1'000'000);
  const std::int64_t costs[] = {300, 400, 300, 240, 170, 100};
  const char* names[] = {"A", "B", "C", "D", "E", "F"};
  for (int i = 0; i < 6; ++i) b.add_project(names[i], k(costs[i]));
  const std::vector<std::vector<ProjectId>> ballots = {
      {0}, {0, 1, 2, 4}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 5}, {3, 4}, {3, 4}, {3, 4, 5}, {2, 3, 5}};
  for (std::size_t v = 0; v < ballots.size(); ++v) b.add_approval_voter("v" + std::to_string(v + 1), ballots[v]);
  return b.build(model);
}

// 403 voters want the budget-sized A, 11 want the small B.
inline Election helenka(std::size_t big = 403, std::size_t small = 11, Num big_cost = make_num(310'000),
                        Num small_cost = make_num(6'000), Num budget = make_num(310'000)) {
  ElectionBuilder b;
  b.budget = budget;
  auto a = b.add_project("A", big_cost);
  auto s = b.add_project("B", small_cost);
  for (std::size_t i = 0; i < big; ++i) b.add_approval_voter("a" + std::to_string(i), std::vector<ProjectId>{a});
  for (std::size_t i = 0; i < small; ++i) b.add_approval_voter("b" + std::to_string(i), std::vector<ProjectId>{s});
  return b.build(UtilityModel::Cost);
}

inline Election tail_utilities() {
  ElectionBuilder b;
  b.budget = 1;
  auto a = b.add_project("A", 1);
  auto c = b.add_project("B", 1);
  for (int i = 0; i < 99; ++i) {
    std::pair<ProjectId, Num> ballot[] = {{a, 100}, {c, 2}};
    b.add_voter("v" + std::to_string(i), ballot);
  }
  std::pair<ProjectId, Num> last[] = {{a, 1}, {c, 2}};
  b.add_voter("v99", last);
  return b.build(UtilityModel::Score);
}

// 700 voters share ten unit projects, 300 voters each own one.
inline Election unpopular() {
  ElectionBuilder b;
  b.budget = 10;
  std::vector<ProjectId> shared;
  for (int i = 1; i <= 10; ++i) shared.push_back(b.add_project("A" + std::to_string(i), 1));
  std::vector<ProjectId> own;
  for (int i = 1; i <= 300; ++i) own.push_back(b.add_project("B" + std::to_string(i), 1));
  for (int i = 0; i < 700; ++i) b.add_approval_voter("v" + std::to_string(i + 1), shared);
  for (int i = 0; i < 300; ++i) b.add_approval_voter("v" + std::to_string(701 + i), std::vector<ProjectId>{own[i]});
  return b.build(UtilityModel::Cost);
}

inline std::vector<std::string> names(const Election& e, const std::vector<ProjectId>& ids) {
  std::vector<std::string> out;
  for (auto id : ids) out.push_back(e.project(id).name);
  return out;
}

inline std::vector<std::string> sorted_names(const Election& e, std::vector<ProjectId> ids) {
  auto out = names(e, ids);
  std::sort(out.begin(), out.end());
  return out;
}

inline TieBreaker order(const Election& e, std::initializer_list<const char*> list) {
  std::vector<ProjectId> ids;
  for (auto n : list) ids.push_back(e.project_by_name(n));
  return TieBreaker(ids);
}

// Random approval election with integer costs; every voter approves at least
// one project.
inline Election random_approval(std::mt19937_64& rng, std::size_t max_voters, std::size_t max_projects,
                                UtilityModel model = UtilityModel::Cost) {
  std::uniform_int_distribution<std::size_t> nv(1, max_voters), np(1, max_projects);
  const std::size_t n = nv(rng), m = np(rng);
  ElectionBuilder b;
  std::uniform_int_distribution<int> cost(1, 10);
  std::int64_t total = 0, max_cost = 0;
  for (std::size_t c = 0; c < m; ++c) {
    int x = cost(rng);
    total += x;
    max_cost = std::max<std::int64_t>(max_cost, x);
    b.add_project("p" + std::to_string(c), x);
  }
  std::uniform_int_distribution<std::int64_t> budget(max_cost, std::max(max_cost, total));
  b.budget = budget(rng);
  std::bernoulli_distribution coin(0.45);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<ProjectId> ballot;
    for (ProjectId c = 0; c < m; ++c)
      if (coin(rng)) ballot.push_back(c);
    if (ballot.empty()) ballot.push_back(pick(rng));
    b.add_approval_voter("v" + std::to_string(v), ballot);
  }
  return b.build(model);
}

// Random cardinal election: scores in 1..5 with some zeros, integer costs.
inline Election random_cardinal(std::mt19937_64& rng, std::size_t max_voters, std::size_t max_projects,
                                UtilityModel model) {
  std::uniform_int_distribution<std::size_t> nv(1, max_voters), np(1, max_projects);
  const std::size_t n = nv(rng), m = np(rng);
  ElectionBuilder b;
  std::uniform_int_distribution<int> cost(1, 9);
  std::int64_t total = 0, max_cost = 0;
  for (std::size_t c = 0; c < m; ++c) {
    int x = cost(rng);
    total += x;
    max_cost = std::max<std::int64_t>(max_cost, x);
    b.add_project("p" + std::to_string(c), x);
  }
  b.budget = std::uniform_int_distribution<std::int64_t>(max_cost, total)(rng);
  std::uniform_int_distribution<int> score(0, 5);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::pair<ProjectId, Num>> ballot;
    for (ProjectId c = 0; c < m; ++c)
      if (int s = score(rng); s > 0) ballot.emplace_back(c, s);
    if (ballot.empty()) ballot.emplace_back(0, 1);
    b.add_voter("v" + std::to_string(v), ballot);
  }
  return b.build(model);
}

}  // namespace eqs::test
