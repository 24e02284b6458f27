#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eqshares/pabulib.hpp"
#include "pb_fuzz.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace eqs;
using namespace eqs::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSmall =
    "META\n"
    "key;value\n"
    "description;\"a; quoted \"\"value\"\"\"\n"
    "budget;100\n"
    "vote_type;approval\n"
    "PROJECTS\n"
    "project_id;name;cost\n"
    "1;Park;60\n"
    "2;Library;50\n"
    "3;Castle;250\n"
    "VOTES\n"
    "voter_id;age;vote\n"
    "a;30;1,2\n"
    "b;41;2\n"
    "c;;3,1\n";

ParseError::Kind kind_of(const std::string& text) {
  try {
    parse_pb(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ParseError::Kind::Io;
}

std::size_t line_of(const std::string& text) {
  try {
    parse_pb(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string with_votes(const std::string& type, const std::string& header, const std::string& rows) {
  return "META\nkey;value\nbudget;10\nvote_type;" + type + "\nPROJECTS\nproject_id;cost\nx;4\ny;3\nz;2\nVOTES\n" + header +
         "\n" + rows;
}

}  // namespace

TEST_SUITE("parse") {
  TEST_CASE("columns are found by name and extras kept") {
    auto pb = parse_pb(kSmall);
    CHECK(pb.meta_value("description") == "a; quoted \"value\"");
    CHECK(pb.budget() == 100);
    CHECK(pb.ballot_type() == BallotType::Approval);
    REQUIRE(pb.projects.size() == 3);
    CHECK(pb.projects[1].id == "2");
    CHECK(pb.projects[1].cost == 50);
    CHECK(pb.project_columns == std::vector<std::string>{"name"});
    CHECK(pb.projects[0].extra == std::vector<std::string>{"Park"});
    CHECK(pb.vote_columns == std::vector<std::string>{"age"});
    CHECK(pb.votes[2].vote == std::vector<std::string>{"3", "1"});
    CHECK(pb.votes[2].extra == std::vector<std::string>{""});
    CHECK_FALSE(pb.has_points);
  }

  TEST_CASE("CRLF reads like LF") {
    std::string crlf;
    for (char ch : std::string(kSmall)) {
      if (ch == '\n') crlf += '\r';
      crlf += ch;
    }
    CHECK(parse_pb(crlf) == parse_pb(kSmall));
  }

  TEST_CASE("over-budget projects are dropped with a warning") {
    std::vector<std::string> warnings;
    auto e = ballots_to_utilities(parse_pb(kSmall), UtilityModel::Cost, &warnings);
    CHECK(e.n_projects() == 2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("3") != std::string::npos);
    CHECK(e.n_voters() == 3);
    CHECK(e.scores().support(2).size() == 1);
    CHECK(e.utilities().at(0, 0) == 60);
  }

  TEST_CASE("section and column errors carry kind and line") {
    CHECK(kind_of("PROJECTS\nproject_id;cost\n") == ParseError::Kind::SectionOrder);
    CHECK(kind_of("hello\nMETA\n") == ParseError::Kind::SectionOrder);
    CHECK(line_of("hello\nMETA\n") == 1);
    CHECK(kind_of("META\nkey;value\nbudget;1\nvote_type;approval\nVOTES\nvoter_id;vote\n") ==
          ParseError::Kind::SectionOrder);
    CHECK(kind_of("META\nkey;value\nbudget;1\nvote_type;approval\nPROJECTS\nproject_id;price\n") ==
          ParseError::Kind::MissingColumn);
    CHECK(line_of("META\nkey;value\nbudget;1\nvote_type;approval\nPROJECTS\nproject_id;price\n") == 6);
    CHECK(kind_of(with_votes("approval", "voter;vote", "")) == ParseError::Kind::MissingColumn);
    CHECK(kind_of("META\nkey;value\nvote_type;approval\nPROJECTS\nproject_id;cost\n") == ParseError::Kind::MissingField);
    CHECK(kind_of("META\nkey;value\nbudget;10\nPROJECTS\nproject_id;cost\n") == ParseError::Kind::MissingField);
    CHECK(kind_of("META\nkey;value\nbudget;ten\nvote_type;approval\nPROJECTS\nproject_id;cost\n") ==
          ParseError::Kind::BadNumber);
    CHECK(kind_of("META\nkey;value\nbudget;10\nvote_type;plurality\nPROJECTS\nproject_id;cost\n") ==
          ParseError::Kind::UnknownVoteType);
  }

  TEST_CASE("row errors") {
    CHECK(kind_of(with_votes("approval", "voter_id;vote", "a;x,w\n")) == ParseError::Kind::DanglingProject);
    CHECK(line_of(with_votes("approval", "voter_id;vote", "a;x\nb;x,w\n")) == 13);
    CHECK(kind_of(with_votes("approval", "voter_id;vote", "a;x\na;y\n")) == ParseError::Kind::DuplicateId);
    CHECK(kind_of(with_votes("approval", "voter_id;vote", "a;x,x\n")) == ParseError::Kind::BadBallot);
    CHECK(kind_of(with_votes("approval", "voter_id;vote", "a;x;extra\n")) == ParseError::Kind::BadRow);
    CHECK(kind_of(with_votes("approval", "voter_id;vote", "a;\"x\n")) == ParseError::Kind::BadRow);
    CHECK(kind_of(with_votes("approval", "voter_id;vote", ";x\n")) == ParseError::Kind::MissingField);
    CHECK(kind_of(with_votes("scoring", "voter_id;vote", "a;x\n")) == ParseError::Kind::BadBallot);
    CHECK(kind_of(with_votes("scoring", "voter_id;vote;points", "a;x,y;3\n")) == ParseError::Kind::BadBallot);
    CHECK(kind_of(with_votes("scoring", "voter_id;vote;points", "a;x;three\n")) == ParseError::Kind::BadNumber);
    CHECK(kind_of("META\nkey;value\nbudget;10\nvote_type;approval\nPROJECTS\nproject_id;cost\nx;0\n") ==
          ParseError::Kind::BadNumber);
    CHECK(kind_of("META\nkey;value\nbudget;10\nvote_type;approval\nPROJECTS\nproject_id;cost\nx;1\nx;2\n") ==
          ParseError::Kind::DuplicateId);
    CHECK(kind_of("META\nkey;value\nbudget;10\nbudget;11\n") == ParseError::Kind::DuplicateId);
  }

  TEST_CASE("ballot conversions") {
    auto choose = ballots_to_utilities(parse_pb(with_votes("choose-1", "voter_id;vote", "a;y\n")), UtilityModel::Score);
    CHECK(choose.scores().at(0, 1) == 1);
    CHECK_THROWS_AS(
        ballots_to_utilities(parse_pb(with_votes("choose-1", "voter_id;vote", "a;x,y\n")), UtilityModel::Score),
        ParseError);

    auto cumulative = ballots_to_utilities(
        parse_pb(with_votes("cumulative", "voter_id;vote;points", "a;x,z;7,3\n")), UtilityModel::Cost);
    CHECK(cumulative.scores().at(0, 2) == 3);
    CHECK(cumulative.utilities().at(0, 0) == 28);
    CHECK_THROWS_AS(ballots_to_utilities(parse_pb(with_votes("scoring", "voter_id;vote;points", "a;x;-1\n")),
                                         UtilityModel::Score),
                    ParseError);

    auto ordinal =
        ballots_to_utilities(parse_pb(with_votes("ordinal", "voter_id;vote", "a;z,x,y\nb;y\n")), UtilityModel::Score);
    CHECK(ordinal.scores().at(0, 2) == 3);
    CHECK(ordinal.scores().at(0, 0) == 2);
    CHECK(ordinal.scores().at(0, 1) == 1);
    CHECK(ordinal.scores().at(1, 1) == 1);
  }

  TEST_CASE("ordinal scores are counted after dropping") {
    const std::string text =
        "META\nkey;value\nbudget;5\nvote_type;ordinal\nPROJECTS\nproject_id;cost\nbig;9\nx;1\ny;1\nVOTES\nvoter_id;vote\n"
        "a;big,x,y\n";
    auto e = ballots_to_utilities(parse_pb(text), UtilityModel::Score);
    CHECK(e.n_projects() == 2);
    CHECK(e.scores().at(0, 0) == 2);
    CHECK(e.scores().at(0, 1) == 1);
  }

  TEST_CASE("missing file") {
    try {
      load_election("/nonexistent/file.pb", UtilityModel::Cost);
      FAIL("expected an error");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::Io);
    }
  }
}

TEST_SUITE("round trip") {
  TEST_CASE("bundled fixtures") {
    for (const char* name : {"running_example.pb", "helenka.pb", "tail_utilities.pb", "popular_block.pb"}) {
      CAPTURE(name);
      auto pb = parse_pb(slurp(fixture(name)));
      auto text = write_pb(pb);
      CHECK(parse_pb(text) == pb);
      CHECK(write_pb(parse_pb(text)) == text);
    }
  }

  TEST_CASE("fixture files describe the built instances") {
    CHECK(load_election(fixture("running_example.pb"), UtilityModel::Cost).utilities() == running_example().utilities());
    auto tail = load_election(fixture("tail_utilities.pb"), UtilityModel::Score);
    CHECK(tail.utilities() == tail_utilities().utilities());
    CHECK(ballot_type_of(tail) == BallotType::Scoring);
    CHECK(load_election(fixture("popular_block.pb"), UtilityModel::Cost).utilities() == unpopular().utilities());
  }

  TEST_CASE("election to file and back") {
    for (auto e : {running_example(), tail_utilities()}) {
      auto type = e.is_approval() ? BallotType::Approval : BallotType::Scoring;
      auto back = ballots_to_utilities(parse_pb(write_pb(e, type)), e.model());
      CHECK(back.scores() == e.scores());
      CHECK(back.budget() == e.budget());
      CHECK(std::equal(back.projects().begin(), back.projects().end(), e.projects().begin(), e.projects().end()));
    }
  }

  TEST_CASE("metadata survives unless it contradicts the election") {
    auto pb = parse_pb(slurp(fixture("running_example.pb")));
    auto e = ballots_to_utilities(pb, UtilityModel::Cost);
    auto out = to_pb(e, BallotType::Approval);
    CHECK(out.meta == pb.meta);
    auto scoring = to_pb(e, BallotType::Scoring);
    CHECK(scoring.meta_value("vote_type") == "scoring");
    CHECK(scoring.meta_value("description") == pb.meta_value("description"));
    CHECK_THROWS_AS(to_pb(tail_utilities(), BallotType::Approval), std::invalid_argument);
    CHECK_THROWS_AS(to_pb(running_example(), BallotType::Choose1), std::invalid_argument);
  }

  TEST_CASE("fuzzed files") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      CAPTURE(trial);
      auto pb = random_pb(rng, trial);
      auto text = write_pb(pb);
      auto back = parse_pb(text);
      CHECK(back == pb);
      CHECK(write_pb(back) == text);
    }
  }

  TEST_CASE("corrupted input fails only with parse errors") {
    const std::string base = slurp(fixture("running_example.pb"));
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    const std::string junk = ";\",\n\r x0-/";
    std::uniform_int_distribution<std::size_t> pick(0, junk.size() - 1);
    for (int trial = 0; trial < 300; ++trial) {
      std::string text = base;
      for (int edits = 0; edits < 3; ++edits) text[pos(rng)] = junk[pick(rng)];
      try {
        auto pb = parse_pb(text);
        (void)ballots_to_utilities(pb, UtilityModel::Cost);
      } catch (const ParseError&) {
      } catch (const std::invalid_argument&) {
        // a valid file can still describe an invalid election (e.g. no projects left)
      }
    }
  }
}
