#include "eqshares/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <spdlog/spdlog.h>
#include <sstream>
#include <thread>

namespace eqs {
namespace {

std::string exact(const Num& value) { return to_string(value); }

Json optional_num(const std::optional<Num>& value) { return value ? Json(exact(*value)) : Json(nullptr); }

std::string fmt_double(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::optional<Num> metric_value(const Json& value) {
  if (value.is_null()) return std::nullopt;
  if (value.is_boolean()) return Num(value.get<bool>() ? 1 : 0);
  if (value.is_number_integer()) return Num(value.get<long long>());
  if (value.is_number_unsigned()) return Num(value.get<unsigned long long>());
  if (value.is_number_float()) return from_double(value.get<double>());
  if (value.is_string()) return try_parse_num(value.get<std::string>());
  return std::nullopt;
}

// Splits a CSV line on commas; sidecars never quote.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

const std::array<std::string_view, 8> kMetrics{
    "relative_score_satisfaction", "relative_cost_satisfaction", "exclusion_ratio", "budget_spent_fraction",
    "exhaustive", "ejr_plus_violations", "ejr_plus_violation_instance", "runtime_seconds"};

}  // namespace

RuleConfig resolve_rule_config(const BenchConfig& config, const Election& election) {
  RuleConfig out = config.rule;
  if (config.tie_order_names.empty()) return out;
  std::vector<ProjectId> order;
  for (const auto& name : config.tie_order_names) {
    try {
      order.push_back(election.project_by_name(name));
    } catch (const std::out_of_range&) {
    }
  }
  out.tie_breaker = TieBreaker(std::move(order));
  return out;
}

std::string config_hash(RuleKind rule, const BenchConfig& config) {
  std::string canonical = "rule=" + std::string(rule_name(rule)) + ";model=" + std::string(to_string(config.model)) +
                          ";tie=";
  if (!config.tie_order_names.empty()) {
    for (const auto& name : config.tie_order_names) canonical += name + ",";
  } else {
    for (ProjectId c : config.rule.tie_breaker.priority()) canonical += std::to_string(c) + ",";
  }
  canonical += ";step=" + exact(config.rule.add1u_step);
  canonical += ";redistribute=" + std::string(config.rule.exhaustive_redistribution ? "1" : "0");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json payment_json(const Election& election, const Payment& p) {
  Json j;
  j["voter"] = election.voter_names()[p.voter];
  j["budget_before"] = exact(p.budget_before);
  if (p.raise != 0) j["raise"] = exact(p.raise);
  j["payment"] = exact(p.payment);
  j["charged"] = exact(p.charged);
  j["overspent"] = exact(p.overspent);
  return j;
}

Json round_json(const Election& election, const Round& round) {
  Json j;
  j["project"] = election.project(round.project).name;
  j["alpha"] = exact(round.alpha);
  j["rho"] = exact(round.rho);
  j["completion"] = round.completion;
  if (round.plus) {
    const auto& plus = *round.plus;
    j["plus"] = {{"bos_project", election.project(plus.bos_project).name},
                 {"bos_alpha", exact(plus.bos_alpha)},
                 {"bos_rho", exact(plus.bos_rho)},
                 {"delta_b", exact(plus.delta_b)},
                 {"fallback", plus.fallback}};
  }
  j["payments"] = Json::array();
  for (const auto& p : round.payments) j["payments"].push_back(payment_json(election, p));
  return j;
}

Json outcome_json(const Election& election, const RuleResult& result, bool include_rounds) {
  Json j;
  if (const auto* outcome = std::get_if<Outcome>(&result)) {
    j["selected"] = Json::array();
    for (ProjectId c : outcome->selected) j["selected"].push_back(election.project(c).name);
    j["total_cost"] = exact(outcome->total_cost(election));
    j["feasible"] = is_feasible(election, *outcome);
    j["initial_endowment"] = exact(outcome->initial_endowment);
    if (include_rounds) {
      j["rounds"] = Json::array();
      for (const auto& round : outcome->rounds) j["rounds"].push_back(round_json(election, round));
    }
  } else {
    const auto& frac = std::get<FractionalOutcome>(result);
    j["selected"] = Json::array();
    j["fractions"] = Json::object();
    for (ProjectId c = 0; c < frac.fractions.size(); ++c) {
      if (frac.fractions[c] == 0) continue;
      j["selected"].push_back(election.project(c).name);
      j["fractions"][election.project(c).name] = exact(frac.fractions[c]);
    }
    j["total_cost"] = exact(frac.total_cost(election));
    j["feasible"] = is_feasible(election, frac);
    j["initial_endowment"] = exact(frac.initial_endowment);
    if (include_rounds) {
      j["purchases"] = Json::array();
      for (const auto& purchase : frac.purchases) {
        Json p;
        p["project"] = election.project(purchase.project).name;
        p["fraction"] = exact(purchase.fraction);
        p["rho"] = exact(purchase.rho);
        p["completion"] = purchase.completion;
        p["payments"] = Json::array();
        for (const auto& pay : purchase.payments) p["payments"].push_back(payment_json(election, pay));
        j["purchases"].push_back(std::move(p));
      }
    }
  }
  return j;
}

Json audit_json(const AuditReport& report) {
  Json j;
  j["score_satisfaction"] = exact(report.score_satisfaction);
  j["cost_satisfaction"] = exact(report.cost_satisfaction);
  j["relative_score_satisfaction"] = optional_num(report.relative_score_satisfaction);
  j["relative_cost_satisfaction"] = optional_num(report.relative_cost_satisfaction);
  j["exclusion_ratio"] = exact(report.exclusion_ratio);
  j["budget_spent_fraction"] = exact(report.budget_spent_fraction);
  j["exhaustive"] = report.exhaustive;
  j["ejr_plus_violations"] = report.ejr_plus_violations ? Json(*report.ejr_plus_violations) : Json(nullptr);
  return j;
}

Json run_record(const std::string& instance, RuleKind rule, const Election& election, const BenchConfig& config,
                bool include_rounds) {
  using Clock = std::chrono::steady_clock;
  const RuleConfig rule_config = resolve_rule_config(config, election);
  std::vector<double> times;
  std::optional<RuleResult> result;
  const std::size_t repeats = std::max<std::size_t>(config.repeats, 1);
  for (std::size_t r = 0; r < repeats; ++r) {
    auto start = Clock::now();
    RuleResult current = run_rule(rule, election, rule_config);
    times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    if (!result) result = std::move(current);
  }
  std::sort(times.begin(), times.end());
  const double median =
      times.size() % 2 ? times[times.size() / 2] : (times[times.size() / 2 - 1] + times[times.size() / 2]) / 2;

  const Outcome reference = rule == RuleKind::Utilitarian ? std::get<Outcome>(*result)
                                                          : utilitarian(election, rule_config);

  Json j;
  j["instance"] = instance;
  j["rule"] = rule_name(rule);
  j["model"] = to_string(config.model);
  j["ballot_type"] = to_string(ballot_type_of(election));
  j["n_projects"] = election.n_projects();
  j["n_voters"] = election.n_voters();
  j["budget"] = exact(election.budget());
  j["config_hash"] = config_hash(rule, config);
  j["outcome"] = outcome_json(election, *result, include_rounds);
  j["audit"] = audit_json(audit(election, *result, reference));
  if (!config.omit_timing) j["runtime_seconds"] = median;
  return j;
}

BatchResult run_batch(const std::filesystem::path& directory, std::span<const RuleKind> rules,
                      const BenchConfig& config, std::size_t parallelism) {
  BatchResult out;
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pb") files.push_back(entry.path());
  }
  if (ec) throw std::runtime_error("cannot list " + directory.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  out.files = files.size();

  std::vector<std::vector<Json>> per_file(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      try {
        std::vector<std::string> warnings;
        Election election = load_election(files[k], config.model, &warnings);
        const std::string instance = files[k].stem().string();
        for (RuleKind rule : rules) per_file[k].push_back(run_record(instance, rule, election, config, false));
      } catch (const std::exception& e) {
        per_file[k].clear();
        errors[k] = files[k].filename().string() + ": " + e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(files.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < files.size(); ++k) {
    if (!errors[k].empty()) {
      ++out.failed;
      out.warnings.push_back(errors[k]);
      continue;
    }
    for (auto& record : per_file[k]) out.records.push_back(std::move(record));
  }
  std::stable_sort(out.records.begin(), out.records.end(), [](const Json& a, const Json& b) {
    const auto ai = a["instance"].get<std::string>(), bi = b["instance"].get<std::string>();
    if (ai != bi) return ai < bi;
    return a["rule"].get<std::string>() < b["rule"].get<std::string>();
  });
  return out;
}

std::string records_csv(const std::vector<Json>& records) {
  std::ostringstream os;
  os << "instance,rule,model,ballot_type,n_projects,n_voters,budget,config_hash,selected,total_cost,"
        "score_satisfaction,cost_satisfaction,relative_score_satisfaction,relative_cost_satisfaction,"
        "exclusion_ratio,budget_spent_fraction,exhaustive,ejr_plus_violations,runtime_seconds\n";
  auto cell = [](const Json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_string()) return csv_field(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  };
  for (const auto& r : records) {
    std::string selected;
    for (const auto& name : r["outcome"]["selected"]) {
      if (!selected.empty()) selected += ' ';
      selected += name.get<std::string>();
    }
    const auto& a = r["audit"];
    os << cell(r["instance"]) << ',' << cell(r["rule"]) << ',' << cell(r["model"]) << ',' << cell(r["ballot_type"])
       << ',' << cell(r["n_projects"]) << ',' << cell(r["n_voters"]) << ',' << cell(r["budget"]) << ','
       << cell(r["config_hash"]) << ',' << csv_field(selected) << ',' << cell(r["outcome"]["total_cost"]) << ','
       << cell(a["score_satisfaction"]) << ',' << cell(a["cost_satisfaction"]) << ','
       << cell(a["relative_score_satisfaction"]) << ',' << cell(a["relative_cost_satisfaction"]) << ','
       << cell(a["exclusion_ratio"]) << ',' << cell(a["budget_spent_fraction"]) << ',' << cell(a["exhaustive"])
       << ',' << cell(a["ejr_plus_violations"]) << ','
       << (r.contains("runtime_seconds") ? cell(r["runtime_seconds"]) : std::string()) << '\n';
  }
  return os.str();
}

std::string Bucket::label() const {
  return high ? std::to_string(low) + "-" + std::to_string(high) : std::to_string(low) + "+";
}

bool Bucket::contains(std::size_t n_projects) const {
  return n_projects >= low && (high == 0 || n_projects <= high);
}

std::vector<Bucket> parse_buckets(std::string_view spec) {
  if (spec == "standard") return {{1, 8}, {9, 15}, {16, 27}, {28, 0}};
  if (spec == "shifted") return {{1, 8}, {9, 16}, {17, 28}, {29, 0}};
  std::vector<Bucket> out;
  std::stringstream ss{std::string(spec)};
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        if (!part.empty() && part.back() == '+') {
          out.push_back({std::stoul(part.substr(0, part.size() - 1)), 0});
        } else {
          auto v = std::stoul(part);
          out.push_back({v, v});
        }
      } else {
        auto low = std::stoul(part.substr(0, dash));
        auto rest = part.substr(dash + 1);
        out.push_back({low, rest.empty() ? 0 : std::stoul(rest)});
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad bucket '" + part + "'");
    }
    const auto& b = out.back();
    if (b.low == 0 || (b.high && b.high < b.low)) throw std::invalid_argument("bad bucket '" + part + "'");
  }
  if (out.empty()) throw std::invalid_argument("no buckets given");
  return out;
}

Num quantile(std::vector<Num> values, const Num& p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const Num h = Num(static_cast<long>(values.size() - 1)) * p;
  Int lo_int = numerator(h) / denominator(h);
  const auto lo = static_cast<std::size_t>(lo_int.convert_to<unsigned long long>());
  if (lo + 1 >= values.size()) return values.back();
  const Num frac = h - Num(lo_int);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Summary summarize(std::vector<Num> values) {
  if (values.empty()) throw std::invalid_argument("summary of an empty sample");
  std::sort(values.begin(), values.end());
  Summary s;
  s.count = values.size();
  Num sum = 0;
  for (const auto& v : values) sum += v;
  const Num count(static_cast<long>(values.size()));
  s.mean = sum / count;
  Num squares = 0;
  for (const auto& v : values) squares += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(to_double(squares / count));
  s.q10 = quantile(values, make_num(1, 10));
  s.q25 = quantile(values, make_num(1, 4));
  s.q50 = quantile(values, make_num(1, 2));
  s.q75 = quantile(values, make_num(3, 4));
  s.q90 = quantile(values, make_num(9, 10));
  return s;
}

std::span<const std::string_view> aggregate_metrics() { return kMetrics; }

std::vector<AggregateRow> aggregate(const std::vector<Json>& records, const std::vector<Bucket>& buckets) {
  // (rule, metric index, bucket index or buckets.size() for all, ballot type) -> values
  std::map<std::tuple<std::string, std::size_t, std::size_t, std::string>, std::vector<Num>> groups;
  const std::string all = "all";
  for (const auto& r : records) {
    const auto rule = r.at("rule").get<std::string>();
    const auto ballot = r.at("ballot_type").get<std::string>();
    const auto n_projects = r.at("n_projects").get<std::size_t>();
    const auto& a = r.at("audit");
    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      std::optional<Num> value;
      const std::string key(kMetrics[m]);
      if (key == "runtime_seconds") {
        if (r.contains(key)) value = metric_value(r[key]);
      } else if (key == "ejr_plus_violation_instance") {
        if (a.contains("ejr_plus_violations")) {
          auto v = metric_value(a["ejr_plus_violations"]);
          if (v) value = Num(*v > 0 ? 1 : 0);
        }
      } else if (a.contains(key)) {
        value = metric_value(a[key]);
      }
      if (!value) continue;
      std::vector<std::size_t> bucket_ids{buckets.size()};
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (buckets[b].contains(n_projects)) bucket_ids.push_back(b);
      }
      for (auto b : bucket_ids) {
        groups[{rule, m, b, ballot}].push_back(*value);
        groups[{rule, m, b, "~all"}].push_back(*value);
      }
    }
  }
  std::vector<AggregateRow> rows;
  for (auto& [key, values] : groups) {
    const auto& [rule, m, b, ballot] = key;
    rows.push_back({rule, std::string(kMetrics[m]), b == buckets.size() ? all : buckets[b].label(),
                    ballot == "~all" ? all : ballot, summarize(std::move(values))});
  }
  return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows, bool exact_values) {
  std::ostringstream os;
  os << "rule,metric,bucket,ballot_type,count,mean,std,q10,q25,q50,q75,q90\n";
  auto num = [&](const Num& v) { return exact_values ? exact(v) : fmt_double(to_double(v), 12); };
  for (const auto& row : rows) {
    const auto& s = row.summary;
    os << row.rule << ',' << row.metric << ',' << row.bucket << ',' << row.ballot_type << ',' << s.count << ','
       << num(s.mean) << ',' << fmt_double(s.std, 12) << ',' << num(s.q10) << ',' << num(s.q25) << ','
       << num(s.q50) << ',' << num(s.q75) << ',' << num(s.q90) << '\n';
  }
  return os.str();
}

std::vector<Json> read_jsonl(std::string_view text) {
  std::vector<Json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto& r = out.back();
    if (!r.is_object() || !r.contains("rule") || !r.contains("instance") || !r.contains("audit") ||
        !r.contains("n_projects") || !r.contains("ballot_type")) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": not a run record");
    }
  }
  return out;
}

PlotData plot_data(const std::vector<Json>& records, const std::filesystem::path& coords_dir) {
  std::ostringstream points, voters;
  points << "rule,instance,candidate,x,y,weight\n";
  voters << "instance,voter,x,y\n";
  std::map<std::string, std::map<std::string, std::pair<std::string, std::string>>> candidate_cache;
  std::set<std::string> voters_done;

  for (const auto& r : records) {
    const auto instance = r.at("instance").get<std::string>();
    auto it = candidate_cache.find(instance);
    if (it == candidate_cache.end()) {
      const auto path = coords_dir / (instance + ".coords.csv");
      std::ifstream in(path);
      if (!in) throw std::runtime_error("missing coordinates sidecar " + path.string());
      std::map<std::string, std::pair<std::string, std::string>> candidates;
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4) throw std::runtime_error("malformed sidecar row in " + path.string());
        if (f[0] == "candidate") {
          candidates[f[1]] = {f[2], f[3]};
        } else if (f[0] == "voter" && !voters_done.count(instance)) {
          voters << instance << ',' << f[1] << ',' << f[2] << ',' << f[3] << '\n';
        }
      }
      voters_done.insert(instance);
      it = candidate_cache.emplace(instance, std::move(candidates)).first;
    }
    const auto& outcome = r.at("outcome");
    const auto rule = r.at("rule").get<std::string>();
    for (const auto& name_json : outcome.at("selected")) {
      const auto name = name_json.get<std::string>();
      auto c = it->second.find(name);
      if (c == it->second.end()) throw std::runtime_error("candidate " + name + " missing from sidecar of " + instance);
      std::string weight = "1";
      if (outcome.contains("fractions")) {
        weight = fmt_double(to_double(parse_num(outcome["fractions"].at(name).get<std::string>())), 12);
      }
      points << rule << ',' << instance << ',' << name << ',' << c->second.first << ',' << c->second.second << ','
             << weight << '\n';
    }
  }
  return {points.str(), voters.str()};
}

}  // namespace eqs
