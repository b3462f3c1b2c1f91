#pragma once
// Config-driven experiments.  Every acceptance criterion is one or more
// registered experiments; the CLI and the acceptance binary share the
// registry, the default parameters and the pinned tolerances.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracchain/output.hpp"

namespace fc {

struct ExperimentConfig {
  std::string experiment;
  std::string subcommand;  // optional; checked against the registry when present
  std::uint64_t seed = 1;
  Json params = Json::object();
  Json tolerances = Json::object();
  std::string out_dir;  // empty: no artifacts
};

// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Check { le, lt, ge, gt, abs_le, in_range, in_range_mc, info };

struct ResultRecord {
  std::string experiment;
  int criterion = 0;
  std::string metric;
  double value = 0.0;
  double error = 0.0;   // error bar (MC) or budget, 0 when exact
  double target = 0.0;  // reference value or threshold
  double lo = 0.0, hi = 0.0;
  double tolerance = 0.0;
  Check check = Check::info;
  bool hard = true;
  bool pass = true;
  double runtime = 0.0;
  std::string anchor;
  std::string note;
};

std::string to_string(Check c);
Json to_json(const ResultRecord& r);
ResultRecord record_from_json(const Json& j);

struct RunContext {
  const ExperimentConfig* config = nullptr;
  Json params;      // resolved
  Json tolerances;  // resolved
  std::uint64_t seed = 1;
  std::string experiment;
  int criterion = 0;
  std::string anchor;
  std::vector<ResultRecord> records;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, PlotSpec>> plots;  // table name, plot
  Json extra = Json::object();

  double tol(const std::string& name) const;
  // value <= tol(name) etc.; returns the stored record
  ResultRecord& le(const std::string& metric, double value, const std::string& tol_name, double error = 0.0);
  ResultRecord& lt(const std::string& metric, double value, const std::string& tol_name, double error = 0.0);
  ResultRecord& ge(const std::string& metric, double value, const std::string& tol_name, double error = 0.0);
  ResultRecord& gt(const std::string& metric, double value, const std::string& tol_name, double error = 0.0);
  ResultRecord& abs_le(const std::string& metric, double value, double target, const std::string& tol_name);
  // value <= bound / value >= bound with a computed bound
  ResultRecord& le_bound(const std::string& metric, double value, double bound, double error = 0.0);
  ResultRecord& ge_bound(const std::string& metric, double value, double bound, double error = 0.0);
  // value in [lo, hi] (exact)
  ResultRecord& in_range(const std::string& metric, double value, double lo, double hi);
  // MC estimate: |est - clamp(est, lo, hi)| <= 2 se and se <= tol(se_name)
  ResultRecord& in_range_mc(const std::string& metric, double est, double se, double lo, double hi,
                            const std::string& se_name);
  ResultRecord& info(const std::string& metric, double value, double error = 0.0, const std::string& note = "");
  void table(const std::string& name, Table t);
  void plot(const std::string& table_name, PlotSpec p);
};

struct ExperimentInfo {
  std::string id;
  int criterion = 0;  // 0: exploratory, not an acceptance criterion
  std::string subcommand;
  std::string anchor;
  std::string description;
  Json defaults;    // parameters
  Json tolerances;  // pinned defaults
  std::function<void(RunContext&)> run;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& find_experiment(const std::string& id);
std::vector<const ExperimentInfo*> experiments_for_criterion(int criterion);
std::vector<std::string> subcommands();

struct RunResult {
  std::string experiment;
  int criterion = 0;
  Json resolved;  // full config as run
  std::vector<ResultRecord> records;
  double runtime = 0.0;
  bool pass() const;  // all hard records pass
};

// Writes results.json, results.csv, the tables and their plots under
// config.out_dir when it is set.
RunResult run_config(const ExperimentConfig& config);

struct ReportRow {
  int criterion = 0;
  std::string experiments;
  std::string anchor;
  int records = 0;
  int failed = 0;
  bool pass = true;
  double runtime = 0.0;
};

// Scans dir recursively for results.json files.
std::vector<ReportRow> build_report(const std::string& dir);
std::string format_report(const std::vector<ReportRow>& rows);

// One line per record and a summary line.
std::string format_records(const RunResult& r);

}  // namespace fc
