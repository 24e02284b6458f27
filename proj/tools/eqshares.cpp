#include "eqshares/bench.hpp"
#include "eqshares/synth.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <sstream>

namespace fs = std::filesystem;
using namespace eqs;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kFlags = 3, kEmpty = 4 };

struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("eqshares");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EQS_LOG")) {
    auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string_view(env) != "off") {
      spdlog::warn("unknown EQS_LOG level '{}', keeping warn", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::Io, 0, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& target, const std::string& text) {
  if (target.empty() || target == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + target);
  out << text;
}

std::vector<std::string> read_tie_order(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ParseError&) {
    throw FlagError("cannot read tie order file " + path);
  }
  std::vector<std::string> names;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream items(line);
    std::string item;
    while (std::getline(items, item, ',')) {
      auto b = item.find_first_not_of(" \t\r");
      auto e = item.find_last_not_of(" \t\r");
      if (b != std::string::npos) names.push_back(item.substr(b, e - b + 1));
    }
  }
  return names;
}

struct CommonFlags {
  std::string model = "cost";
  std::string tie_order;
  std::string add1u_step = "1";
  bool exhaustive_redistribution = false;
  bool check_invariants = false;
  bool omit_timing = false;
  std::size_t repeats = 1;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--model", flags.model, "utility model: score or cost")->capture_default_str();
  app->add_option("--tie-order", flags.tie_order, "file listing project ids, highest priority first");
  app->add_option("--add1u-step", flags.add1u_step, "endowment increment for mes-add1u")->capture_default_str();
  app->add_flag("--exhaustive-redistribution", flags.exhaustive_redistribution,
                "bos: hand the money of fully served voters to the rest");
  app->add_flag("--check-invariants", flags.check_invariants, "verify every round while running");
  app->add_flag("--omit-timing", flags.omit_timing, "leave runtime_seconds out of the records");
  app->add_option("--repeats", flags.repeats, "timed runs per rule, median reported")->capture_default_str();
}

BenchConfig bench_config(const CommonFlags& flags) {
  BenchConfig config;
  try {
    config.model = parse_utility_model(flags.model);
  } catch (const std::invalid_argument& e) {
    throw FlagError(e.what());
  }
  auto step = try_parse_num(flags.add1u_step);
  if (!step || *step <= 0) throw FlagError("--add1u-step must be a positive number");
  config.rule.add1u_step = *step;
  config.rule.exhaustive_redistribution = flags.exhaustive_redistribution;
  config.rule.check_invariants = flags.check_invariants;
  config.omit_timing = flags.omit_timing;
  if (flags.repeats == 0) throw FlagError("--repeats must be at least 1");
  config.repeats = flags.repeats;
  if (!flags.tie_order.empty()) config.tie_order_names = read_tie_order(flags.tie_order);
  return config;
}

std::vector<RuleKind> parse_rules(const std::string& text) {
  if (text == "all") return {compared_rules().begin(), compared_rules().end()};
  if (text == "every") return {all_rules().begin(), all_rules().end()};
  std::vector<RuleKind> out;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    try {
      out.push_back(parse_rule(item));
    } catch (const std::invalid_argument& e) {
      throw FlagError(e.what());
    }
  }
  if (out.empty()) throw FlagError("no rules given");
  return out;
}

int cmd_run(const std::string& instance, const std::string& rule_text, const CommonFlags& flags,
            const std::string& out) {
  RuleKind rule;
  try {
    rule = parse_rule(rule_text);
  } catch (const std::invalid_argument& e) {
    throw FlagError(e.what());
  }
  BenchConfig config = bench_config(flags);
  Election election = load_election(instance, config.model);
  for (const auto& name : config.tie_order_names) {
    try {
      election.project_by_name(name);
    } catch (const std::out_of_range&) {
      throw FlagError("tie order names unknown project '" + name + "'");
    }
  }
  Json record = run_record(fs::path(instance).stem().string(), rule, election, config, true);
  write_output(out, record.dump(2) + "\n");
  return kOk;
}

int cmd_batch(const std::string& directory, const std::string& rules_text, const CommonFlags& flags,
              std::size_t parallelism, const std::string& format, const std::string& out) {
  const auto rules = parse_rules(rules_text);
  if (format != "jsonl" && format != "csv") throw FlagError("--format must be jsonl or csv");
  if (parallelism == 0) throw FlagError("--parallelism must be at least 1");
  BenchConfig config = bench_config(flags);
  if (!fs::is_directory(directory)) throw FlagError(directory + " is not a directory");
  BatchResult result = run_batch(directory, rules, config, parallelism);
  for (const auto& w : result.warnings) spdlog::warn("skipped {}", w);
  if (result.files == 0 || result.failed == result.files) {
    spdlog::error("no instance could be evaluated in {}", directory);
    return kParse;
  }
  std::string text;
  if (format == "csv") {
    text = records_csv(result.records);
  } else {
    for (const auto& r : result.records) text += r.dump() + "\n";
  }
  write_output(out, text);
  return kOk;
}

int cmd_aggregate(const std::string& records_path, const std::string& bucket_spec, bool exact,
                  const std::string& out) {
  std::vector<Bucket> buckets;
  try {
    buckets = parse_buckets(bucket_spec);
  } catch (const std::invalid_argument& e) {
    throw FlagError(e.what());
  }
  std::vector<Json> records;
  try {
    records = read_jsonl(read_file(records_path));
  } catch (const std::runtime_error& e) {
    throw ParseError(ParseError::Kind::BadRow, 0, records_path + ": " + e.what());
  }
  if (records.empty()) {
    spdlog::error("{} holds no records", records_path);
    return kEmpty;
  }
  std::vector<AggregateRow> rows;
  try {
    rows = aggregate(records, buckets);
  } catch (const Json::exception& e) {
    throw ParseError(ParseError::Kind::BadRow, 0, records_path + ": " + e.what());
  }
  write_output(out, aggregate_csv(rows, exact));
  return kOk;
}

struct GenFlags {
  std::string generator;
  int distribution = 1;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string lambda = "1";
  double sigma = 0.1;
  std::size_t candidates = 150;
  std::size_t ell = 1;
};

int cmd_gen(const GenFlags& g, const std::string& out) {
  if (out.empty()) throw FlagError("gen needs --out <directory>");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw std::runtime_error("cannot create " + out);
  Json manifest;
  manifest["generator"] = g.generator;
  manifest["files"] = Json::array();

  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
  };

  if (g.generator == "euclidean") {
    if (g.distribution < 1 || g.distribution > 3) throw FlagError("--dist must be 1, 2 or 3");
    auto lambda = try_parse_num(g.lambda);
    if (!lambda || *lambda <= 0) throw FlagError("--lambda must be positive");
    if (!(g.sigma > 0)) throw FlagError("--sigma must be positive");
    manifest["distribution"] = g.distribution;
    manifest["count"] = g.count;
    manifest["seed"] = g.seed;
    manifest["lambda"] = to_string(*lambda);
    manifest["sigma"] = g.sigma;
    manifest["n_candidates"] = g.candidates;
    for (std::size_t k = 0; k < g.count; ++k) {
      EuclideanConfig config = euclidean_preset(g.distribution, g.sigma);
      config.lambda = *lambda;
      config.n_candidates = g.candidates;
      config.seed = g.seed + k * 65536;
      auto generated = gen_euclidean(config);
      char stem[96];
      std::snprintf(stem, sizeof stem, "euclidean-d%d-s%llu-%03zu", g.distribution,
                    static_cast<unsigned long long>(g.seed), k);
      write(fs::path(out) / (std::string(stem) + ".pb"), write_pb(generated.election, BallotType::Scoring));
      write(fs::path(out) / (std::string(stem) + ".coords.csv"), coordinates_csv(generated));
      manifest["files"].push_back({{"instance", stem}, {"seed", config.seed}});
    }
  } else if (g.generator == "prop1") {
    if (g.ell == 0) throw FlagError("--ell must be at least 1");
    auto instance = gen_prop_one(g.ell);
    const std::string stem = "prop1-ell" + std::to_string(g.ell);
    write(fs::path(out) / (stem + ".pb"), write_pb(instance.election, BallotType::Approval));
    std::string order;
    for (ProjectId c : instance.tie_breaker.priority()) order += instance.election.project(c).name + "\n";
    write(fs::path(out) / (stem + ".tie-order.txt"), order);
    manifest["ell"] = g.ell;
    manifest["files"].push_back({{"instance", stem}, {"tie_order", stem + ".tie-order.txt"}});
  } else {
    throw FlagError("unknown generator '" + g.generator + "' (euclidean or prop1)");
  }
  write(fs::path(out) / "manifest.json", manifest.dump(2) + "\n");
  return kOk;
}

int cmd_plotdata(const std::string& records_path, const std::string& coords, const std::string& out) {
  if (out.empty()) throw FlagError("plotdata needs --out <directory>");
  std::vector<Json> records;
  try {
    records = read_jsonl(read_file(records_path));
  } catch (const std::runtime_error& e) {
    throw ParseError(ParseError::Kind::BadRow, 0, records_path + ": " + e.what());
  }
  PlotData data;
  try {
    data = plot_data(records, coords.empty() ? fs::path(records_path).parent_path() : fs::path(coords));
  } catch (const std::runtime_error& e) {
    throw ParseError(ParseError::Kind::Io, 0, e.what());
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw std::runtime_error("cannot create " + out);
  write_output((fs::path(out) / "selected_points.csv").string(), data.selected_points);
  write_output((fs::path(out) / "voters.csv").string(), data.voters);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Participatory budgeting rules, audits and benchmarks"};
  app.require_subcommand(1);

  std::string out;
  CommonFlags run_flags, batch_flags;

  auto* run = app.add_subcommand("run", "evaluate one rule on one .pb instance");
  std::string instance, rule = "mes";
  run->add_option("instance", instance, ".pb file")->required();
  run->add_option("--rule", rule, "utilitarian, mes, mes-add1u, fres, fres-complete, bos, bos-plus")
      ->capture_default_str();
  add_common(run, run_flags);
  run->add_option("--out", out, "output file (default stdout)");

  auto* batch = app.add_subcommand("batch", "evaluate rules on every .pb file of a directory");
  std::string directory, rules = "all", format = "jsonl";
  std::size_t parallelism = 1;
  batch->add_option("directory", directory)->required();
  batch->add_option("--rule,--rules", rules, "comma list, 'all' (five compared rules) or 'every'")
      ->capture_default_str();
  batch->add_option("--parallelism", parallelism, "worker threads")->capture_default_str();
  batch->add_option("--format", format, "jsonl or csv")->capture_default_str();
  add_common(batch, batch_flags);
  batch->add_option("--out", out, "output file (default stdout)");

  auto* agg = app.add_subcommand("aggregate", "summary statistics over batch records");
  std::string records_path, buckets = "standard";
  bool exact = false;
  agg->add_option("records", records_path, "JSONL records")->required();
  agg->add_option("--buckets", buckets, "standard, shifted or ranges like 1-8,9-15,16-27,28-")->capture_default_str();
  agg->add_flag("--exact", exact, "print mean and quantiles as exact fractions");
  agg->add_option("--out", out, "output file (default stdout)");

  auto* gen = app.add_subcommand("gen", "write synthetic instances");
  GenFlags g;
  gen->add_option("generator", g.generator, "euclidean or prop1")->required();
  gen->add_option("--dist", g.distribution, "euclidean voter distribution 1, 2 or 3")->capture_default_str();
  gen->add_option("--count", g.count, "number of elections")->capture_default_str();
  gen->add_option("--seed", g.seed, "base seed")->capture_default_str();
  gen->add_option("--lambda", g.lambda, "distance offset")->capture_default_str();
  gen->add_option("--sigma", g.sigma, "Gaussian deviation")->capture_default_str();
  gen->add_option("--candidates", g.candidates, "candidates per election")->capture_default_str();
  gen->add_option("--ell", g.ell, "prop1 size parameter")->capture_default_str();
  gen->add_option("--out", out, "output directory")->required();

  auto* plot = app.add_subcommand("plotdata", "selected-candidate coordinates for plotting");
  std::string plot_records, coords;
  plot->add_option("records", plot_records, "JSONL records")->required();
  plot->add_option("--coords", coords, "directory with <instance>.coords.csv (default: next to records)");
  plot->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFlags;
  }

  try {
    if (*run) return cmd_run(instance, rule, run_flags, out);
    if (*batch) return cmd_batch(directory, rules, batch_flags, parallelism, format, out);
    if (*agg) return cmd_aggregate(records_path, buckets, exact, out);
    if (*gen) return cmd_gen(g, out);
    if (*plot) return cmd_plotdata(plot_records, coords, out);
  } catch (const FlagError& e) {
    spdlog::error("{}", e.what());
    return kFlags;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kParse;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kFailure;
}
