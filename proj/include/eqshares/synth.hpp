#pragma once

#include "eqshares/election.hpp"
#include "eqshares/rules.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eqs {

struct AxisDistribution {
  enum class Kind { Uniform, Normal, Beta };
  Kind kind = Kind::Uniform;
  double a = 0;  ///< low bound, mean, or beta alpha
  double b = 1;  ///< high bound, standard deviation, or beta beta

  static AxisDistribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static AxisDistribution normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
  static AxisDistribution beta(double alpha, double beta) { return {Kind::Beta, alpha, beta}; }
};

struct VoterCluster {
  std::size_t count = 0;
  AxisDistribution x;
  AxisDistribution y;
};

struct EuclideanConfig {
  std::size_t n_candidates = 150;
  std::vector<VoterCluster> clusters;
  Num lambda = 1;
  Num unit_cost = 1;
  Num budget = 10;
  std::int64_t quantization = 1'000'000'000;
  std::uint64_t seed = 0;
  int distribution = 0;  ///< preset number recorded in metadata, 0 for custom
};

/// Presets 1..3: two rectangles; Gaussian x with Gaussian y; Gaussian x with
/// beta(1.5, 3) y. 100 voters on the left, 50 on the right.
EuclideanConfig euclidean_preset(int distribution, double sigma = 0.1);

struct Point {
  double x = 0;
  double y = 0;
};

/// 1 / (distance + lambda) rounded to the nearest multiple of 1 / quantization.
Num euclidean_utility(Point voter, Point candidate, const Num& lambda, std::int64_t quantization);

struct EuclideanElection {
  Election election;
  std::vector<Point> voters;
  std::vector<Point> candidates;
};

/// Candidates uniform on the unit square, voters per cluster, utility
/// 1 / (distance + lambda) rounded to the nearest multiple of
/// 1 / quantization. Scores are the utilities; every candidate costs
/// unit_cost. Randomness: boost::random::mt19937_64 with one stream per
/// entity kind (candidates, then each voter cluster), each seeded with
/// splitmix64(seed + stream index). Throws std::invalid_argument on a bad
/// configuration.
EuclideanElection gen_euclidean(const EuclideanConfig& config);

/// Sidecar CSV with header kind,id,x,y; kind is "voter" or "candidate" and id
/// is the name used in the election.
std::string coordinates_csv(const EuclideanElection& generated);

std::uint64_t splitmix64(std::uint64_t x);

struct PropOneInstance {
  Election election;
  TieBreaker tie_breaker;  ///< third group first, then the second, then the first
  std::vector<ProjectId> group1, group2, group3;
};

/// The hard instance family: ell voters approving ell private candidates,
/// 4 ell^2 voters approving 4 ell^2 - ell shared candidates and, in 2 ell
/// blocks of 2 ell voters, one block candidate each. Unit costs, budget
/// 4 ell^2 + ell, cost utilities.
PropOneInstance gen_prop_one(std::size_t ell);

}  // namespace eqs
