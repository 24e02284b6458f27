#pragma once

#include "eqshares/num.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eqs {

using ProjectId = std::size_t;
using VoterId = std::size_t;

enum class UtilityModel { Score, Cost };

std::string_view to_string(UtilityModel model);
UtilityModel parse_utility_model(std::string_view text);

struct Project {
  ProjectId id = 0;
  std::string name;
  Num cost;

  friend bool operator==(const Project&, const Project&) = default;
};

/// One nonzero cell of a utility matrix, addressed from either side.
struct Entry {
  std::size_t index = 0;
  Num value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct Triplet {
  VoterId voter = 0;
  ProjectId project = 0;
  Num value;
};

/// Sparse voter x project matrix of non-negative values. Rows and columns are
/// sorted by index; zero entries are never stored.
class UtilityProfile {
 public:
  UtilityProfile() = default;
  /// Duplicate (voter, project) triplets are summed. Throws on negative values
  /// or out-of-range indices.
  UtilityProfile(std::size_t n_voters, std::size_t n_projects, std::vector<Triplet> triplets);

  std::size_t n_voters() const { return by_voter_.size(); }
  std::size_t n_projects() const { return by_project_.size(); }

  /// Projects the voter values positively, ascending by project id.
  std::span<const Entry> support(VoterId voter) const { return by_voter_.at(voter); }
  /// Voters valuing the project positively, ascending by voter id.
  std::span<const Entry> supporters(ProjectId project) const { return by_project_.at(project); }

  /// Zero when absent.
  Num at(VoterId voter, ProjectId project) const;

  /// Sum of a column.
  Num total(ProjectId project) const;

  /// Entry-wise transform; entries mapped to zero are dropped.
  template <class F>
  UtilityProfile transformed(F&& f) const {
    std::vector<Triplet> out;
    for (VoterId v = 0; v < n_voters(); ++v) {
      for (const auto& e : by_voter_[v]) out.push_back({v, e.index, f(v, e.index, e.value)});
    }
    return UtilityProfile(n_voters(), n_projects(), std::move(out));
  }

  std::size_t nonzeros() const;

  friend bool operator==(const UtilityProfile&, const UtilityProfile&) = default;

 private:
  std::vector<std::vector<Entry>> by_voter_;
  std::vector<std::vector<Entry>> by_project_;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Immutable election: projects, voters, budget, and both the raw score
/// profile and the utility profile used by the rules.
class Election {
 public:
  Election() = default;
  /// Validates budget > 0, 0 < cost <= budget, dense ids, profile shape.
  /// Throws std::invalid_argument.
  Election(std::vector<Project> projects, std::vector<std::string> voter_names, Num budget,
           UtilityProfile scores, UtilityModel model, Metadata metadata = {});

  std::span<const Project> projects() const { return projects_; }
  const Project& project(ProjectId id) const { return projects_.at(id); }
  const Num& cost(ProjectId id) const { return projects_.at(id).cost; }
  std::size_t n_projects() const { return projects_.size(); }
  std::size_t n_voters() const { return voter_names_.size(); }
  std::span<const std::string> voter_names() const { return voter_names_; }
  const Num& budget() const { return budget_; }
  UtilityModel model() const { return model_; }
  const Metadata& metadata() const { return metadata_; }
  /// Empty when the key is absent.
  std::string meta(std::string_view key) const;

  const UtilityProfile& scores() const { return scores_; }
  /// Scores under the Score model, scores x cost under the Cost model.
  const UtilityProfile& utilities() const { return utilities_; }
  const UtilityProfile& profile(UtilityModel model) const {
    return model == UtilityModel::Score ? scores_ : cost_utilities_;
  }

  /// Same data evaluated under another utility model.
  Election with_model(UtilityModel model) const;

  /// Looks up a project by its external name; throws std::out_of_range.
  ProjectId project_by_name(std::string_view name) const;

  /// All stored scores equal to one.
  bool is_approval() const;

  friend bool operator==(const Election&, const Election&) = default;

 private:
  std::vector<Project> projects_;
  std::vector<std::string> voter_names_;
  Num budget_;
  UtilityProfile scores_;
  UtilityProfile cost_utilities_;
  UtilityProfile utilities_;
  UtilityModel model_ = UtilityModel::Cost;
  Metadata metadata_;
};

/// output(i, c) = scores(i, c) * cost(c).
UtilityProfile derive_cost_utilities(const UtilityProfile& scores, std::span<const Project> projects);

/// Convenience builder used by fixtures and generators: voters given as lists
/// of (project, score).
struct ElectionBuilder {
  std::vector<Project> projects;
  std::vector<std::string> voter_names;
  std::vector<Triplet> scores;
  Num budget;
  Metadata metadata;

  ProjectId add_project(std::string name, Num cost);
  VoterId add_voter(std::string name, std::span<const std::pair<ProjectId, Num>> ballot);
  VoterId add_approval_voter(std::string name, std::span<const ProjectId> approved);
  Election build(UtilityModel model) const;
};

}  // namespace eqs
