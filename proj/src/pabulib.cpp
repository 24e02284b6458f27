#include "eqshares/pabulib.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <spdlog/spdlog.h>
#include <unordered_map>

namespace eqs {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on ';' honouring double quotes ("" inside quotes is a literal quote).
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (ch == ';') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else if (!was_quoted || !std::isspace(static_cast<unsigned char>(ch))) {
      field += ch;
    }
  }
  if (quoted) throw ParseError(ParseError::Kind::BadRow, line_no, "unterminated quote");
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  cell = trim(cell);
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = cell.find(',', start);
    out.emplace_back(trim(cell.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string render(const Num& value) {
  if (auto d = to_decimal(value)) return *d;
  return to_string(value);
}

std::string quote(const std::string& field) {
  bool needs = field.find_first_of(";\"\n\r") != std::string::npos ||
               (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                                   std::isspace(static_cast<unsigned char>(field.back()))));
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_row(std::ostringstream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ';';
    os << quote(fields[i]);
  }
  os << '\n';
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

enum class Section { None, Meta, Projects, Votes };

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), kind_(kind), line_(line) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Io: return "io";
    case ParseError::Kind::SectionOrder: return "section-order";
    case ParseError::Kind::MissingColumn: return "missing-column";
    case ParseError::Kind::MissingField: return "missing-field";
    case ParseError::Kind::BadRow: return "bad-row";
    case ParseError::Kind::UnknownVoteType: return "unknown-vote-type";
    case ParseError::Kind::BadNumber: return "bad-number";
    case ParseError::Kind::DanglingProject: return "dangling-project";
    case ParseError::Kind::DuplicateId: return "duplicate-id";
    case ParseError::Kind::BadBallot: return "bad-ballot";
  }
  return "unknown";
}

std::string_view to_string(BallotType type) {
  switch (type) {
    case BallotType::Approval: return "approval";
    case BallotType::Choose1: return "choose-1";
    case BallotType::Cumulative: return "cumulative";
    case BallotType::Scoring: return "scoring";
    case BallotType::Ordinal: return "ordinal";
  }
  return "approval";
}

BallotType parse_ballot_type(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "approval") return BallotType::Approval;
  if (t == "choose-1" || t == "choose1") return BallotType::Choose1;
  if (t == "cumulative") return BallotType::Cumulative;
  if (t == "scoring") return BallotType::Scoring;
  if (t == "ordinal") return BallotType::Ordinal;
  throw std::invalid_argument("unknown vote type: " + std::string(text));
}

std::string PbFile::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

Num PbFile::budget() const { return parse_num(meta_value("budget")); }

BallotType PbFile::ballot_type() const { return parse_ballot_type(meta_value("vote_type")); }

PbFile parse_pb(std::string_view text) {
  PbFile pb;
  Section section = Section::None;
  bool header_pending = false;
  std::size_t project_col = 0, cost_col = 0, voter_col = 0, vote_col = 0, points_col = 0;
  std::vector<std::size_t> project_extra, vote_extra;
  std::size_t header_width = 0;
  std::map<std::string, std::size_t> meta_lines;
  std::unordered_map<std::string, std::size_t> project_index;
  std::set<std::string> voter_ids;
  bool seen_projects = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const auto t = trim(raw);
    if (t.empty()) continue;

    const std::string marker = lower(t);
    if (marker == "meta" || marker == "projects" || marker == "votes") {
      Section next = marker == "meta" ? Section::Meta : marker == "projects" ? Section::Projects : Section::Votes;
      if (static_cast<int>(next) <= static_cast<int>(section) ||
          (next != Section::Meta && section == Section::None)) {
        throw ParseError(ParseError::Kind::SectionOrder, line_no, "unexpected section " + std::string(t));
      }
      if (next == Section::Votes && !seen_projects) {
        throw ParseError(ParseError::Kind::SectionOrder, line_no, "VOTES before PROJECTS");
      }
      seen_projects = seen_projects || next == Section::Projects;
      section = next;
      header_pending = true;
      continue;
    }
    if (section == Section::None) {
      throw ParseError(ParseError::Kind::SectionOrder, line_no, "content before the META section");
    }

    auto fields = split_fields(t, line_no);
    if (header_pending) {
      header_pending = false;
      header_width = fields.size();
      if (section == Section::Meta) continue;
      std::vector<std::string> names;
      for (const auto& f : fields) names.push_back(lower(f));
      auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
      };
      auto require = [&](std::string_view name) {
        auto idx = find(name);
        if (!idx) throw ParseError(ParseError::Kind::MissingColumn, line_no, "missing column " + std::string(name));
        return *idx;
      };
      if (section == Section::Projects) {
        project_col = require("project_id");
        cost_col = require("cost");
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (i == project_col || i == cost_col) continue;
          project_extra.push_back(i);
          pb.project_columns.push_back(fields[i]);
        }
      } else {
        voter_col = require("voter_id");
        vote_col = require("vote");
        auto points = find("points");
        pb.has_points = points.has_value();
        points_col = points.value_or(0);
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (i == voter_col || i == vote_col || (pb.has_points && i == points_col)) continue;
          vote_extra.push_back(i);
          pb.vote_columns.push_back(fields[i]);
        }
      }
      continue;
    }

    if (fields.size() > header_width && section != Section::Meta) {
      throw ParseError(ParseError::Kind::BadRow, line_no,
                       "row has " + std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(header_width));
    }
    fields.resize(std::max(fields.size(), header_width));

    if (section == Section::Meta) {
      // Unquoted semicolons inside a value are kept as part of it.
      for (std::size_t i = 2; i < fields.size(); ++i) fields[1] += ";" + fields[i];
      fields.resize(2);
      if (meta_lines.count(fields[0])) {
        throw ParseError(ParseError::Kind::DuplicateId, line_no, "duplicate META key " + fields[0]);
      }
      meta_lines[fields[0]] = line_no;
      pb.meta.emplace_back(fields[0], fields[1]);
    } else if (section == Section::Projects) {
      PbProject p;
      p.line = line_no;
      p.id = fields[project_col];
      if (p.id.empty()) throw ParseError(ParseError::Kind::MissingField, line_no, "empty project_id");
      auto cost = try_parse_num(fields[cost_col]);
      if (!cost) throw ParseError(ParseError::Kind::BadNumber, line_no, "cost is not a number: " + fields[cost_col]);
      if (*cost <= 0) throw ParseError(ParseError::Kind::BadNumber, line_no, "cost must be positive");
      p.cost = *cost;
      for (auto i : project_extra) p.extra.push_back(fields[i]);
      if (!project_index.emplace(p.id, pb.projects.size()).second) {
        throw ParseError(ParseError::Kind::DuplicateId, line_no, "duplicate project id " + p.id);
      }
      pb.projects.push_back(std::move(p));
    } else {
      PbVote v;
      v.line = line_no;
      v.voter_id = fields[voter_col];
      if (v.voter_id.empty()) throw ParseError(ParseError::Kind::MissingField, line_no, "empty voter_id");
      if (!voter_ids.insert(v.voter_id).second) {
        throw ParseError(ParseError::Kind::DuplicateId, line_no, "duplicate voter id " + v.voter_id);
      }
      v.vote = split_list(fields[vote_col]);
      std::set<std::string> seen;
      for (const auto& id : v.vote) {
        if (!project_index.count(id)) {
          throw ParseError(ParseError::Kind::DanglingProject, line_no, "vote references unknown project '" + id + "'");
        }
        if (!seen.insert(id).second) {
          throw ParseError(ParseError::Kind::BadBallot, line_no, "project " + id + " listed twice");
        }
      }
      if (pb.has_points) {
        for (const auto& item : split_list(fields[points_col])) {
          auto value = try_parse_num(item);
          if (!value) throw ParseError(ParseError::Kind::BadNumber, line_no, "points entry is not a number: " + item);
          v.points.push_back(*value);
        }
        if (!v.points.empty() && v.points.size() != v.vote.size()) {
          throw ParseError(ParseError::Kind::BadBallot, line_no, "points and vote lists differ in length");
        }
      }
      for (auto i : vote_extra) v.extra.push_back(fields[i]);
      pb.votes.push_back(std::move(v));
    }
  }

  if (section == Section::None) throw ParseError(ParseError::Kind::SectionOrder, 0, "no META section");
  if (!seen_projects) throw ParseError(ParseError::Kind::SectionOrder, 0, "no PROJECTS section");

  auto budget_line = meta_lines.find("budget");
  if (budget_line == meta_lines.end()) throw ParseError(ParseError::Kind::MissingField, 0, "META has no budget");
  auto budget = try_parse_num(pb.meta_value("budget"));
  if (!budget || *budget <= 0) {
    throw ParseError(ParseError::Kind::BadNumber, budget_line->second, "budget must be a positive number");
  }
  auto type_line = meta_lines.find("vote_type");
  if (type_line == meta_lines.end()) throw ParseError(ParseError::Kind::MissingField, 0, "META has no vote_type");
  BallotType type;
  try {
    type = pb.ballot_type();
  } catch (const std::invalid_argument&) {
    throw ParseError(ParseError::Kind::UnknownVoteType, type_line->second,
                     "unknown vote_type '" + pb.meta_value("vote_type") + "'");
  }
  if (type == BallotType::Cumulative || type == BallotType::Scoring) {
    for (const auto& v : pb.votes) {
      if (v.points.size() != v.vote.size()) {
        throw ParseError(ParseError::Kind::BadBallot, v.line, std::string(to_string(type)) + " ballot needs points");
      }
    }
  }
  return pb;
}

Election ballots_to_utilities(const PbFile& pb, UtilityModel model, std::vector<std::string>* warnings) {
  const Num budget = pb.budget();
  const BallotType type = pb.ballot_type();

  std::vector<Project> projects;
  std::unordered_map<std::string, ProjectId> index;
  for (const auto& p : pb.projects) {
    if (p.cost > budget) {
      std::string msg = "dropping project " + p.id + ": cost " + render(p.cost) + " exceeds budget " + render(budget);
      spdlog::warn("{}", msg);
      if (warnings) warnings->push_back(std::move(msg));
      continue;
    }
    index.emplace(p.id, projects.size());
    projects.push_back({projects.size(), p.id, p.cost});
  }

  std::vector<std::string> voters;
  std::vector<Triplet> scores;
  for (const auto& v : pb.votes) {
    const VoterId voter = voters.size();
    voters.push_back(v.voter_id);
    if (type == BallotType::Choose1 && v.vote.size() != 1) {
      throw ParseError(ParseError::Kind::BadBallot, v.line,
                       "choose-1 ballot lists " + std::to_string(v.vote.size()) + " projects");
    }
    if (type == BallotType::Cumulative || type == BallotType::Scoring) {
      for (const auto& pt : v.points) {
        if (pt < 0) throw ParseError(ParseError::Kind::BadBallot, v.line, "negative points");
      }
    }
    std::vector<ProjectId> kept;
    std::vector<Num> kept_points;
    for (std::size_t k = 0; k < v.vote.size(); ++k) {
      auto it = index.find(v.vote[k]);
      if (it == index.end()) continue;
      kept.push_back(it->second);
      if (k < v.points.size()) kept_points.push_back(v.points[k]);
    }
    for (std::size_t k = 0; k < kept.size(); ++k) {
      Num score;
      switch (type) {
        case BallotType::Approval:
        case BallotType::Choose1: score = 1; break;
        case BallotType::Cumulative:
        case BallotType::Scoring: score = kept_points[k]; break;
        case BallotType::Ordinal: score = Num(static_cast<long>(kept.size() - k)); break;
      }
      scores.push_back({voter, kept[k], score});
    }
  }

  UtilityProfile profile(voters.size(), projects.size(), std::move(scores));
  return Election(std::move(projects), std::move(voters), budget, std::move(profile), model, pb.meta);
}

std::string write_pb(const PbFile& pb) {
  std::ostringstream os;
  os << "META\n";
  write_row(os, {"key", "value"});
  for (const auto& [k, v] : pb.meta) write_row(os, {k, v});

  os << "PROJECTS\n";
  std::vector<std::string> header{"project_id", "cost"};
  header.insert(header.end(), pb.project_columns.begin(), pb.project_columns.end());
  write_row(os, header);
  for (const auto& p : pb.projects) {
    std::vector<std::string> row{p.id, render(p.cost)};
    row.insert(row.end(), p.extra.begin(), p.extra.end());
    row.resize(header.size());
    write_row(os, row);
  }

  os << "VOTES\n";
  header = {"voter_id", "vote"};
  if (pb.has_points) header.push_back("points");
  header.insert(header.end(), pb.vote_columns.begin(), pb.vote_columns.end());
  write_row(os, header);
  for (const auto& v : pb.votes) {
    std::vector<std::string> row{v.voter_id, join(v.vote)};
    if (pb.has_points) {
      std::vector<std::string> pts;
      for (const auto& p : v.points) pts.push_back(render(p));
      row.push_back(join(pts));
    }
    row.insert(row.end(), v.extra.begin(), v.extra.end());
    row.resize(header.size());
    write_row(os, row);
  }
  return os.str();
}

PbFile to_pb(const Election& election, BallotType type) {
  PbFile pb;
  pb.meta = election.metadata();
  auto set_meta = [&](const std::string& key, const std::string& value, bool keep_if_equal_num) {
    for (auto& [k, v] : pb.meta) {
      if (k != key) continue;
      if (keep_if_equal_num) {
        auto parsed = try_parse_num(v);
        if (parsed && *parsed == parse_num(value)) return;
      }
      v = value;
      return;
    }
    pb.meta.emplace_back(key, value);
  };
  set_meta("budget", render(election.budget()), true);
  {
    bool keep = false;
    for (const auto& [k, v] : pb.meta) {
      if (k == "vote_type") {
        try {
          keep = parse_ballot_type(v) == type;
        } catch (const std::invalid_argument&) {
        }
      }
    }
    if (!keep) set_meta("vote_type", std::string(to_string(type)), false);
  }
  for (auto& [k, v] : pb.meta) {
    auto fix_count = [&](std::size_t count) {
      auto parsed = try_parse_num(v);
      if (!parsed || *parsed != Num(static_cast<long>(count))) v = std::to_string(count);
    };
    if (k == "num_projects") fix_count(election.n_projects());
    if (k == "num_votes") fix_count(election.n_voters());
  }

  std::set<std::string> names;
  for (const auto& p : election.projects()) {
    if (p.name.empty() || p.name.find(',') != std::string::npos || !names.insert(p.name).second) {
      throw std::invalid_argument("project name '" + p.name + "' cannot be used as a project_id");
    }
    pb.projects.push_back({p.name, p.cost, {}, 0});
  }
  std::set<std::string> voter_names;
  for (const auto& name : election.voter_names()) {
    if (name.empty() || !voter_names.insert(name).second) {
      throw std::invalid_argument("voter name '" + name + "' cannot be used as a voter_id");
    }
  }

  pb.has_points = type == BallotType::Cumulative || type == BallotType::Scoring;
  for (VoterId v = 0; v < election.n_voters(); ++v) {
    PbVote vote;
    vote.voter_id = election.voter_names()[v];
    std::vector<Entry> row(election.scores().support(v).begin(), election.scores().support(v).end());
    const std::string who = "voter " + vote.voter_id;
    switch (type) {
      case BallotType::Approval:
      case BallotType::Choose1:
        for (const auto& e : row) {
          if (e.value != 1) throw std::invalid_argument(who + " has a non-approval score");
        }
        if (type == BallotType::Choose1 && row.size() != 1) {
          throw std::invalid_argument(who + " does not support exactly one project");
        }
        break;
      case BallotType::Cumulative:
        for (const auto& e : row) {
          if (!is_integer(e.value)) throw std::invalid_argument(who + " has non-integer points");
        }
        break;
      case BallotType::Scoring:
        for (const auto& e : row) {
          if (!to_decimal(e.value)) throw std::invalid_argument(who + " has points without a finite decimal form");
        }
        break;
      case BallotType::Ordinal: {
        std::stable_sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.value > b.value; });
        for (std::size_t k = 0; k < row.size(); ++k) {
          if (row[k].value != Num(static_cast<long>(row.size() - k))) {
            throw std::invalid_argument(who + " is not a Borda ranking");
          }
        }
        break;
      }
    }
    for (const auto& e : row) {
      vote.vote.push_back(election.project(e.index).name);
      if (pb.has_points) vote.points.push_back(e.value);
    }
    pb.votes.push_back(std::move(vote));
  }
  return pb;
}

std::string write_pb(const Election& election, BallotType type) { return write_pb(to_pb(election, type)); }

Election load_election(const std::filesystem::path& path, UtilityModel model, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::Io, 0, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ballots_to_utilities(parse_pb(buffer.str()), model, warnings);
}

BallotType ballot_type_of(const Election& election) {
  const auto value = election.meta("vote_type");
  if (value.empty()) return BallotType::Approval;
  try {
    return parse_ballot_type(value);
  } catch (const std::invalid_argument&) {
    return BallotType::Approval;
  }
}

}  // namespace eqs
