#pragma once

#include "eqshares/axioms.hpp"
#include "eqshares/pabulib.hpp"
#include "eqshares/rules.hpp"

#include <filesystem>
#include "json.hpp"
#include <string>
#include <vector>

namespace eqs {

using Json = nlohmann::ordered_json;

struct BenchConfig {
  RuleConfig rule;
  /// Tie order by project name, resolved per election in batch runs; names an
  /// election lacks are skipped. Takes precedence over rule.tie_breaker.
  std::vector<std::string> tie_order_names;
  UtilityModel model = UtilityModel::Cost;
  std::size_t repeats = 1;   ///< timing runs per rule; the median is reported
  bool omit_timing = false;  ///< leave runtime_seconds out so reruns are byte-identical
};

/// Resolves tie_order_names against the election (ignoring unknown names).
RuleConfig resolve_rule_config(const BenchConfig& config, const Election& election);

/// FNV-1a over a canonical rendering of rule, model and flags, as 16 hex digits.
std::string config_hash(RuleKind rule, const BenchConfig& config);

Json payment_json(const Election& election, const Payment& payment);
Json round_json(const Election& election, const Round& round);
Json outcome_json(const Election& election, const RuleResult& result, bool include_rounds);
Json audit_json(const AuditReport& report);

/// Runs one rule on one election and returns its record: identity, outcome,
/// audit and (unless omitted) the median rule-only runtime.
Json run_record(const std::string& instance, RuleKind rule, const Election& election, const BenchConfig& config,
                bool include_rounds);

struct BatchResult {
  std::vector<Json> records;  ///< sorted by instance, then rule name
  std::vector<std::string> warnings;
  std::size_t files = 0;
  std::size_t failed = 0;
};

/// Every *.pb file directly inside the directory, evaluated with each rule.
/// Files that fail to parse are reported in warnings and skipped. Output does
/// not depend on parallelism.
BatchResult run_batch(const std::filesystem::path& directory, std::span<const RuleKind> rules,
                      const BenchConfig& config, std::size_t parallelism);

/// Flat CSV with one row per record.
std::string records_csv(const std::vector<Json>& records);

struct Bucket {
  std::size_t low = 1;
  std::size_t high = 0;  ///< 0 means unbounded
  std::string label() const;
  bool contains(std::size_t n_projects) const;
};

/// "standard" (1-8, 9-15, 16-27, 28+), "shifted" (1-8, 9-16, 17-28, 29+) or an
/// explicit list such as "1-8,9-15,16-27,28-". Throws std::invalid_argument.
std::vector<Bucket> parse_buckets(std::string_view spec);

struct Summary {
  std::size_t count = 0;
  Num mean;
  double std = 0;  ///< population standard deviation
  Num q10, q25, q50, q75, q90;
};

/// Linear interpolation between order statistics at h = (N - 1) p.
Num quantile(std::vector<Num> sorted_values, const Num& p);
Summary summarize(std::vector<Num> values);

struct AggregateRow {
  std::string rule;
  std::string metric;
  std::string bucket;       ///< bucket label or "all"
  std::string ballot_type;  ///< ballot type or "all"
  Summary summary;
};

/// Metrics aggregated per record; missing or null values are skipped.
std::span<const std::string_view> aggregate_metrics();

/// Groups by rule x metric x bucket x ballot type, each also pooled as "all".
/// Rows come out sorted by rule, metric, bucket, ballot type.
std::vector<AggregateRow> aggregate(const std::vector<Json>& records, const std::vector<Bucket>& buckets);

/// exact: mean and quantiles as exact rationals instead of decimals.
std::string aggregate_csv(const std::vector<AggregateRow>& rows, bool exact);

/// Parses JSON lines, ignoring blank lines. Throws std::runtime_error with the
/// line number on malformed input.
std::vector<Json> read_jsonl(std::string_view text);

struct PlotData {
  std::string selected_points;  ///< rule,instance,candidate,x,y,weight
  std::string voters;           ///< instance,voter,x,y
};

/// Joins records with the `<instance>.coords.csv` sidecars found in
/// coords_dir. Throws std::runtime_error when a sidecar is missing.
PlotData plot_data(const std::vector<Json>& records, const std::filesystem::path& coords_dir);

}  // namespace eqs
