#pragma once

#include "eqshares/election.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqs {

enum class BallotType { Approval, Choose1, Cumulative, Scoring, Ordinal };

std::string_view to_string(BallotType type);
/// Case-insensitive; accepts "choose-1" and "choose1". Throws std::invalid_argument.
BallotType parse_ballot_type(std::string_view text);

class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    Io,
    SectionOrder,
    MissingColumn,
    MissingField,
    BadRow,
    UnknownVoteType,
    BadNumber,
    DanglingProject,
    DuplicateId,
    BadBallot,
  };

  ParseError(Kind kind, std::size_t line, const std::string& message);

  Kind kind() const { return kind_; }
  /// 1-based; 0 when the problem is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

std::string_view to_string(ParseError::Kind kind);

struct PbProject {
  std::string id;
  Num cost;
  std::vector<std::string> extra;  ///< values for PbFile::project_columns
  std::size_t line = 0;

  friend bool operator==(const PbProject& a, const PbProject& b) {
    return a.id == b.id && a.cost == b.cost && a.extra == b.extra;
  }
};

struct PbVote {
  std::string voter_id;
  std::vector<std::string> vote;  ///< project ids, in ballot order
  std::vector<Num> points;        ///< empty unless the file has a points column
  std::vector<std::string> extra; ///< values for PbFile::vote_columns
  std::size_t line = 0;

  friend bool operator==(const PbVote& a, const PbVote& b) {
    return a.voter_id == b.voter_id && a.vote == b.vote && a.points == b.points && a.extra == b.extra;
  }
};

/// One .pb file. Extra columns beyond the ones the rules need are kept
/// verbatim so the writer can reproduce them.
struct PbFile {
  Metadata meta;
  std::vector<std::string> project_columns;  ///< header names after project_id;cost
  std::vector<PbProject> projects;
  std::vector<std::string> vote_columns;     ///< header names after voter_id;vote[;points]
  bool has_points = false;
  std::vector<PbVote> votes;

  /// Empty when absent.
  std::string meta_value(std::string_view key) const;
  Num budget() const;
  BallotType ballot_type() const;

  friend bool operator==(const PbFile&, const PbFile&) = default;
};

/// Parses the sectioned, semicolon-separated format. Throws ParseError.
PbFile parse_pb(std::string_view text);

/// Approval and choose-1 give score 1 per listed project, cumulative and
/// scoring use the points, ordinal uses Borda (a ranking of length r gives r
/// to its first entry, then r-1, ...). Projects costing more than the budget
/// are dropped and reported in warnings. Throws ParseError on negative points
/// or a choose-1 ballot that does not list exactly one project.
Election ballots_to_utilities(const PbFile& pb, UtilityModel model, std::vector<std::string>* warnings = nullptr);

/// Canonical text of a parsed file.
std::string write_pb(const PbFile& pb);

/// Serializes the score profile in the given ballot type. Throws
/// std::invalid_argument when the profile is not expressible in it.
PbFile to_pb(const Election& election, BallotType type);
std::string write_pb(const Election& election, BallotType type);

/// Reads and converts a file; parse problems surface as ParseError.
Election load_election(const std::filesystem::path& path, UtilityModel model,
                       std::vector<std::string>* warnings = nullptr);

/// Ballot type recorded in the election's metadata, approval when absent.
BallotType ballot_type_of(const Election& election);

}  // namespace eqs
