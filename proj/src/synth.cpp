#include "eqshares/synth.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eqs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

using Engine = boost::random::mt19937_64;

Engine stream(std::uint64_t seed, std::uint64_t index) { return Engine(splitmix64(seed + index)); }

void validate(const AxisDistribution& d) {
  switch (d.kind) {
    case AxisDistribution::Kind::Uniform:
      if (!(d.a < d.b)) throw std::invalid_argument("uniform axis needs low < high");
      break;
    case AxisDistribution::Kind::Normal:
      if (!(d.b > 0)) throw std::invalid_argument("normal axis needs a positive deviation");
      break;
    case AxisDistribution::Kind::Beta:
      if (!(d.a > 0 && d.b > 0)) throw std::invalid_argument("beta axis needs positive shape parameters");
      break;
  }
}

double draw(const AxisDistribution& d, Engine& engine) {
  switch (d.kind) {
    case AxisDistribution::Kind::Uniform: return boost::random::uniform_real_distribution<double>(d.a, d.b)(engine);
    case AxisDistribution::Kind::Normal: return boost::random::normal_distribution<double>(d.a, d.b)(engine);
    case AxisDistribution::Kind::Beta: return boost::random::beta_distribution<double>(d.a, d.b)(engine);
  }
  return 0;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

EuclideanConfig euclidean_preset(int distribution, double sigma) {
  EuclideanConfig config;
  config.distribution = distribution;
  using D = AxisDistribution;
  switch (distribution) {
    case 1:
      config.clusters = {{100, D::uniform(0.05, 0.4), D::uniform(0.05, 0.95)},
                         {50, D::uniform(0.6, 0.95), D::uniform(0.05, 0.95)}};
      break;
    case 2:
      config.clusters = {{100, D::normal(0.25, sigma), D::normal(0.5, sigma)},
                         {50, D::normal(0.75, sigma), D::normal(0.5, sigma)}};
      break;
    case 3:
      config.clusters = {{100, D::normal(0.25, sigma), D::beta(1.5, 3)},
                         {50, D::normal(0.75, sigma), D::beta(1.5, 3)}};
      break;
    default: throw std::invalid_argument("distribution must be 1, 2 or 3");
  }
  return config;
}

Num euclidean_utility(Point voter, Point candidate, const Num& lambda, std::int64_t quantization) {
  const double distance = std::hypot(voter.x - candidate.x, voter.y - candidate.y);
  const double utility = 1.0 / (distance + to_double(lambda));
  return Num(Int(std::llround(utility * static_cast<double>(quantization))), Int(quantization));
}

EuclideanElection gen_euclidean(const EuclideanConfig& config) {
  if (config.lambda <= 0) throw std::invalid_argument("lambda must be positive");
  if (config.unit_cost <= 0 || config.budget <= 0) throw std::invalid_argument("cost and budget must be positive");
  if (config.unit_cost > config.budget) throw std::invalid_argument("unit cost exceeds the budget");
  if (config.quantization <= 0) throw std::invalid_argument("quantization must be positive");
  if (config.clusters.empty()) throw std::invalid_argument("no voter clusters");
  for (const auto& cluster : config.clusters) {
    if (cluster.count == 0) throw std::invalid_argument("empty voter cluster");
    validate(cluster.x);
    validate(cluster.y);
  }

  EuclideanElection out;
  Engine candidates = stream(config.seed, 0);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < config.n_candidates; ++c) {
    double x = unit(candidates);
    double y = unit(candidates);
    out.candidates.push_back({x, y});
  }
  for (std::size_t k = 0; k < config.clusters.size(); ++k) {
    Engine voters = stream(config.seed, k + 1);
    const auto& cluster = config.clusters[k];
    for (std::size_t i = 0; i < cluster.count; ++i) {
      double x = draw(cluster.x, voters);
      double y = draw(cluster.y, voters);
      out.voters.push_back({x, y});
    }
  }

  ElectionBuilder builder;
  builder.budget = config.budget;
  for (std::size_t c = 0; c < out.candidates.size(); ++c) builder.add_project("c" + std::to_string(c), config.unit_cost);
  std::vector<std::pair<ProjectId, Num>> ballot;
  for (std::size_t v = 0; v < out.voters.size(); ++v) {
    ballot.clear();
    for (std::size_t c = 0; c < out.candidates.size(); ++c) {
      Num u = euclidean_utility(out.voters[v], out.candidates[c], config.lambda, config.quantization);
      if (u == 0) throw std::invalid_argument("utility rounds to zero; raise the quantization");
      ballot.emplace_back(c, std::move(u));
    }
    builder.add_voter("v" + std::to_string(v), ballot);
  }
  builder.metadata = {
      {"description", "synthetic euclidean election"},
      {"country", "synthetic"},
      {"unit", "euclidean"},
      {"instance", "euclidean-" + std::to_string(config.distribution) + "-" + std::to_string(config.seed)},
      {"num_projects", std::to_string(out.candidates.size())},
      {"num_votes", std::to_string(out.voters.size())},
      {"budget", to_decimal(config.budget).value_or(to_string(config.budget))},
      {"vote_type", "scoring"},
      {"rule", "none"},
      {"distribution", std::to_string(config.distribution)},
      {"lambda", to_decimal(config.lambda).value_or(to_string(config.lambda))},
      {"seed", std::to_string(config.seed)},
  };
  out.election = builder.build(UtilityModel::Score);
  return out;
}

std::string coordinates_csv(const EuclideanElection& generated) {
  std::ostringstream os;
  os << "kind,id,x,y\n";
  for (std::size_t v = 0; v < generated.voters.size(); ++v) {
    os << "voter," << generated.election.voter_names()[v] << ',' << fmt_double(generated.voters[v].x) << ','
       << fmt_double(generated.voters[v].y) << '\n';
  }
  for (std::size_t c = 0; c < generated.candidates.size(); ++c) {
    os << "candidate," << generated.election.project(c).name << ',' << fmt_double(generated.candidates[c].x) << ','
       << fmt_double(generated.candidates[c].y) << '\n';
  }
  return os.str();
}

PropOneInstance gen_prop_one(std::size_t ell) {
  if (ell == 0) throw std::invalid_argument("ell must be at least 1");
  const std::size_t big = 4 * ell * ell;
  PropOneInstance out;
  ElectionBuilder builder;
  builder.budget = Num(static_cast<long>(big + ell));
  for (std::size_t k = 0; k < ell; ++k) out.group1.push_back(builder.add_project("C1_" + std::to_string(k + 1), 1));
  for (std::size_t k = 0; k < big - ell; ++k) {
    out.group2.push_back(builder.add_project("C2_" + std::to_string(k + 1), 1));
  }
  for (std::size_t k = 0; k < 2 * ell; ++k) out.group3.push_back(builder.add_project("C3_" + std::to_string(k + 1), 1));

  for (std::size_t i = 0; i < ell; ++i) builder.add_approval_voter("V1_" + std::to_string(i + 1), out.group1);
  std::vector<ProjectId> approved;
  for (std::size_t i = 0; i < big; ++i) {
    approved = out.group2;
    approved.push_back(out.group3[i / (2 * ell)]);
    builder.add_approval_voter("V2_" + std::to_string(i + 1), approved);
  }
  builder.metadata = {
      {"description", "hard instance for bounded overspending, ell=" + std::to_string(ell)},
      {"num_projects", std::to_string(big + 2 * ell)},
      {"num_votes", std::to_string(big + ell)},
      {"budget", std::to_string(big + ell)},
      {"vote_type", "approval"},
  };
  out.election = builder.build(UtilityModel::Cost);

  std::vector<ProjectId> order = out.group3;
  order.insert(order.end(), out.group2.begin(), out.group2.end());
  order.insert(order.end(), out.group1.begin(), out.group1.end());
  out.tie_breaker = TieBreaker(std::move(order));
  return out;
}

}  // namespace eqs
