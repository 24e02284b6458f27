#include "eqshares/election.hpp"

#include <algorithm>
#include <stdexcept>

namespace eqs {

std::string_view to_string(UtilityModel model) {
  return model == UtilityModel::Score ? "score" : "cost";
}

UtilityModel parse_utility_model(std::string_view text) {
  if (text == "score") return UtilityModel::Score;
  if (text == "cost") return UtilityModel::Cost;
  throw std::invalid_argument("unknown utility model: " + std::string(text));
}

UtilityProfile::UtilityProfile(std::size_t n_voters, std::size_t n_projects,
                               std::vector<Triplet> triplets)
    : by_voter_(n_voters), by_project_(n_projects) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.voter != b.voter ? a.voter < b.voter : a.project < b.project;
  });
  for (std::size_t k = 0; k < triplets.size();) {
    const auto& t = triplets[k];
    if (t.voter >= n_voters || t.project >= n_projects) {
      throw std::invalid_argument("utility entry out of range");
    }
    Num sum = 0;
    std::size_t j = k;
    for (; j < triplets.size() && triplets[j].voter == t.voter && triplets[j].project == t.project; ++j) {
      if (triplets[j].value < 0) throw std::invalid_argument("negative utility");
      sum += triplets[j].value;
    }
    if (sum != 0) {
      by_voter_[t.voter].push_back({t.project, sum});
      by_project_[t.project].push_back({t.voter, sum});
    }
    k = j;
  }
}

Num UtilityProfile::at(VoterId voter, ProjectId project) const {
  const auto& row = by_voter_.at(voter);
  auto it = std::lower_bound(row.begin(), row.end(), project,
                             [](const Entry& e, std::size_t p) { return e.index < p; });
  if (it != row.end() && it->index == project) return it->value;
  return 0;
}

Num UtilityProfile::total(ProjectId project) const {
  Num sum = 0;
  for (const auto& e : by_project_.at(project)) sum += e.value;
  return sum;
}

std::size_t UtilityProfile::nonzeros() const {
  std::size_t count = 0;
  for (const auto& row : by_voter_) count += row.size();
  return count;
}

UtilityProfile derive_cost_utilities(const UtilityProfile& scores, std::span<const Project> projects) {
  return scores.transformed(
      [&](VoterId, ProjectId c, const Num& score) { return Num(score * projects[c].cost); });
}

Election::Election(std::vector<Project> projects, std::vector<std::string> voter_names, Num budget,
                   UtilityProfile scores, UtilityModel model, Metadata metadata)
    : projects_(std::move(projects)),
      voter_names_(std::move(voter_names)),
      budget_(std::move(budget)),
      scores_(std::move(scores)),
      model_(model),
      metadata_(std::move(metadata)) {
  if (budget_ <= 0) throw std::invalid_argument("budget must be positive");
  for (std::size_t i = 0; i < projects_.size(); ++i) {
    const auto& p = projects_[i];
    if (p.id != i) throw std::invalid_argument("project ids must be dense and ordered");
    if (p.cost <= 0) throw std::invalid_argument("project " + p.name + " has non-positive cost");
    if (p.cost > budget_) throw std::invalid_argument("project " + p.name + " costs more than the budget");
  }
  if (scores_.n_voters() != voter_names_.size() || scores_.n_projects() != projects_.size()) {
    throw std::invalid_argument("utility profile shape does not match the election");
  }
  cost_utilities_ = derive_cost_utilities(scores_, projects_);
  utilities_ = model_ == UtilityModel::Score ? scores_ : cost_utilities_;
}

std::string Election::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  return {};
}

Election Election::with_model(UtilityModel model) const {
  Election copy = *this;
  copy.model_ = model;
  copy.utilities_ = model == UtilityModel::Score ? scores_ : cost_utilities_;
  return copy;
}

ProjectId Election::project_by_name(std::string_view name) const {
  for (const auto& p : projects_) {
    if (p.name == name) return p.id;
  }
  throw std::out_of_range("unknown project: " + std::string(name));
}

bool Election::is_approval() const {
  for (VoterId v = 0; v < n_voters(); ++v) {
    for (const auto& e : scores_.support(v)) {
      if (e.value != 1) return false;
    }
  }
  return true;
}

ProjectId ElectionBuilder::add_project(std::string name, Num cost) {
  const ProjectId id = projects.size();
  projects.push_back({id, std::move(name), std::move(cost)});
  return id;
}

VoterId ElectionBuilder::add_voter(std::string name, std::span<const std::pair<ProjectId, Num>> ballot) {
  const VoterId id = voter_names.size();
  voter_names.push_back(std::move(name));
  for (const auto& [project, score] : ballot) scores.push_back({id, project, score});
  return id;
}

VoterId ElectionBuilder::add_approval_voter(std::string name, std::span<const ProjectId> approved) {
  const VoterId id = voter_names.size();
  voter_names.push_back(std::move(name));
  for (ProjectId p : approved) scores.push_back({id, p, Num(1)});
  return id;
}

Election ElectionBuilder::build(UtilityModel model) const {
  return Election(projects, voter_names, budget,
                  UtilityProfile(voter_names.size(), projects.size(), scores), model, metadata);
}

}  // namespace eqs
