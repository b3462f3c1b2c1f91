#include "fracchain/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "fracchain/stats.hpp"

namespace fc {

std::string to_string(Check c) {
  switch (c) {
    case Check::le: return "le";
    case Check::lt: return "lt";
    case Check::ge: return "ge";
    case Check::gt: return "gt";
    case Check::abs_le: return "abs_le";
    case Check::in_range: return "in_range";
    case Check::in_range_mc: return "in_range_mc";
    case Check::info: return "info";
  }
  return "info";
}

namespace {

Check check_from_string(const std::string& s) {
  for (Check c : {Check::le, Check::lt, Check::ge, Check::gt, Check::abs_le, Check::in_range, Check::in_range_mc, Check::info})
    if (to_string(c) == s) return c;
  throw Error("unknown check '" + s + "'");
}

// JSON has no infinities; they travel as strings
Json num_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double json_num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  std::string s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

Json to_json(const ResultRecord& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["criterion"] = r.criterion;
  j["metric"] = r.metric;
  j["value"] = num_json(r.value);
  j["error"] = num_json(r.error);
  j["target"] = num_json(r.target);
  j["lo"] = num_json(r.lo);
  j["hi"] = num_json(r.hi);
  j["tolerance"] = num_json(r.tolerance);
  j["check"] = to_string(r.check);
  j["hard"] = r.hard;
  j["pass"] = r.pass;
  j["runtime"] = r.runtime;
  j["anchor"] = r.anchor;
  j["note"] = r.note;
  return j;
}

ResultRecord record_from_json(const Json& j) {
  ResultRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.criterion = j.at("criterion").get<int>();
  r.metric = j.at("metric").get<std::string>();
  r.value = json_num(j.at("value"));
  r.error = json_num(j.at("error"));
  r.target = json_num(j.at("target"));
  r.lo = json_num(j.at("lo"));
  r.hi = json_num(j.at("hi"));
  r.tolerance = json_num(j.at("tolerance"));
  r.check = check_from_string(j.at("check").get<std::string>());
  r.hard = j.at("hard").get<bool>();
  r.pass = j.at("pass").get<bool>();
  r.runtime = j.value("runtime", 0.0);
  r.anchor = j.value("anchor", "");
  r.note = j.value("note", "");
  return r;
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys = {"experiment", "subcommand", "seed", "params", "tolerances", "out", "description"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("config needs a string 'experiment'");
  ExperimentConfig c;
  c.experiment = j["experiment"].get<std::string>();
  const ExperimentInfo* info = nullptr;
  for (const auto& e : registry())
    if (e.id == c.experiment) info = &e;
  if (!info) throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (j.contains("subcommand")) {
    if (!j["subcommand"].is_string()) throw ConfigError("'subcommand' must be a string");
    c.subcommand = j["subcommand"].get<std::string>();
    if (c.subcommand != info->subcommand && c.subcommand != "run")
      throw ConfigError("experiment '" + c.experiment + "' belongs to subcommand '" + info->subcommand + "'");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  auto check_block = [&](const char* name, const Json& defaults, Json& dst) {
    if (!j.contains(name)) return;
    const Json& b = j[name];
    if (!b.is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!defaults.contains(it.key()))
        throw ConfigError(std::string("unknown ") + name + " entry '" + it.key() + "' for experiment '" + c.experiment + "'");
      const Json& d = defaults[it.key()];
      bool ok = (d.is_number() && it.value().is_number()) || (d.is_boolean() && it.value().is_boolean()) ||
                (d.is_string() && it.value().is_string()) || (d.is_array() && it.value().is_array());
      if (!ok) throw ConfigError(std::string(name) + " entry '" + it.key() + "' has the wrong type");
      if (d.is_number_integer() && !it.value().is_number_integer())
        throw ConfigError(std::string(name) + " entry '" + it.key() + "' must be an integer");
    }
    dst = b;
  };
  check_block("params", info->defaults, c.params);
  check_block("tolerances", info->tolerances, c.tolerances);
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("'out' must be a string");
    c.out_dir = j["out"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  Json j;
  try {
    j = read_json(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j);
}

double RunContext::tol(const std::string& name) const {
  if (!tolerances.contains(name)) throw Error("experiment '" + experiment + "' has no tolerance '" + name + "'");
  return tolerances[name].get<double>();
}

namespace {

ResultRecord& push(RunContext& c, const std::string& metric, double value, Check check) {
  ResultRecord r;
  r.experiment = c.experiment;
  r.criterion = c.criterion;
  r.metric = metric;
  r.value = value;
  r.check = check;
  r.anchor = c.anchor;
  c.records.push_back(r);
  return c.records.back();
}

}  // namespace

ResultRecord& RunContext::le(const std::string& metric, double value, const std::string& tol_name, double error) {
  ResultRecord& r = push(*this, metric, value, Check::le);
  r.target = r.tolerance = tol(tol_name);
  r.error = error;
  r.pass = value <= r.target;
  return r;
}

ResultRecord& RunContext::lt(const std::string& metric, double value, const std::string& tol_name, double error) {
  ResultRecord& r = push(*this, metric, value, Check::lt);
  r.target = r.tolerance = tol(tol_name);
  r.error = error;
  r.pass = value < r.target;
  return r;
}

ResultRecord& RunContext::ge(const std::string& metric, double value, const std::string& tol_name, double error) {
  ResultRecord& r = push(*this, metric, value, Check::ge);
  r.target = r.tolerance = tol(tol_name);
  r.error = error;
  r.pass = value >= r.target;
  return r;
}

ResultRecord& RunContext::gt(const std::string& metric, double value, const std::string& tol_name, double error) {
  ResultRecord& r = push(*this, metric, value, Check::gt);
  r.target = r.tolerance = tol(tol_name);
  r.error = error;
  r.pass = value > r.target;
  return r;
}

ResultRecord& RunContext::abs_le(const std::string& metric, double value, double target, const std::string& tol_name) {
  ResultRecord& r = push(*this, metric, value, Check::abs_le);
  r.target = target;
  r.tolerance = tol(tol_name);
  r.error = std::fabs(value - target);
  r.pass = std::fabs(value - target) <= r.tolerance;
  return r;
}

ResultRecord& RunContext::le_bound(const std::string& metric, double value, double bound, double error) {
  ResultRecord& r = push(*this, metric, value, Check::le);
  r.target = bound;
  r.error = error;
  r.pass = value <= bound;
  return r;
}

ResultRecord& RunContext::ge_bound(const std::string& metric, double value, double bound, double error) {
  ResultRecord& r = push(*this, metric, value, Check::ge);
  r.target = bound;
  r.error = error;
  r.pass = value >= bound;
  return r;
}

ResultRecord& RunContext::in_range(const std::string& metric, double value, double lo, double hi) {
  ResultRecord& r = push(*this, metric, value, Check::in_range);
  r.lo = lo;
  r.hi = hi;
  r.pass = value >= lo && value <= hi;
  return r;
}

ResultRecord& RunContext::in_range_mc(const std::string& metric, double est, double se, double lo, double hi,
                                      const std::string& se_name) {
  ResultRecord& r = push(*this, metric, est, Check::in_range_mc);
  r.lo = lo;
  r.hi = hi;
  r.error = se;
  r.tolerance = tol(se_name);
  double c = std::clamp(est, lo, hi);
  r.pass = std::fabs(est - c) <= 2.0 * se && se <= r.tolerance;
  return r;
}

ResultRecord& RunContext::info(const std::string& metric, double value, double error, const std::string& note) {
  ResultRecord& r = push(*this, metric, value, Check::info);
  r.error = error;
  r.hard = false;
  r.note = note;
  return r;
}

void RunContext::table(const std::string& name, Table t) { tables.emplace_back(name, std::move(t)); }
void RunContext::plot(const std::string& table_name, PlotSpec p) { plots.emplace_back(table_name, std::move(p)); }

const ExperimentInfo& find_experiment(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return e;
  throw ConfigError("unknown experiment '" + id + "'");
}

std::vector<const ExperimentInfo*> experiments_for_criterion(int criterion) {
  std::vector<const ExperimentInfo*> out;
  for (const auto& e : registry())
    if (e.criterion == criterion) out.push_back(&e);
  return out;
}

std::vector<std::string> subcommands() {
  return {"couplings", "walk", "green", "chain-gaussian", "chain-integer", "gff2d-line", "regimes", "fbm-compare"};
}

bool RunResult::pass() const {
  for (const auto& r : records)
    if (r.hard && !r.pass) return false;
  return true;
}

RunResult run_config(const ExperimentConfig& config) {
  const ExperimentInfo& info = find_experiment(config.experiment);
  RunContext ctx;
  ctx.config = &config;
  ctx.experiment = info.id;
  ctx.criterion = info.criterion;
  ctx.anchor = info.anchor;
  ctx.seed = config.seed;
  ctx.params = info.defaults;
  for (auto it = config.params.begin(); it != config.params.end(); ++it) ctx.params[it.key()] = it.value();
  ctx.tolerances = info.tolerances;
  for (auto it = config.tolerances.begin(); it != config.tolerances.end(); ++it) ctx.tolerances[it.key()] = it.value();
  auto t0 = std::chrono::steady_clock::now();
  info.run(ctx);
  double rt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunResult res;
  res.experiment = info.id;
  res.criterion = info.criterion;
  res.runtime = rt;
  res.records = ctx.records;
  for (auto& r : res.records) r.runtime = rt;
  res.resolved = Json::object();
  res.resolved["experiment"] = info.id;
  res.resolved["subcommand"] = info.subcommand;
  res.resolved["seed"] = config.seed;
  res.resolved["params"] = ctx.params;
  res.resolved["tolerances"] = ctx.tolerances;
  res.resolved["out"] = config.out_dir;
  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    std::string csv = "experiment,criterion,metric,check,value,error,target,lo,hi,tolerance,hard,pass\n";
    for (const auto& r : res.records) {
      csv += r.experiment + "," + std::to_string(r.criterion) + "," + r.metric + "," + to_string(r.check);
      for (double v : {r.value, r.error, r.target, r.lo, r.hi, r.tolerance}) csv += "," + format_double(v);
      csv += std::string(",") + (r.hard ? "1" : "0") + "," + (r.pass ? "1" : "0") + "\n";
    }
    write_text(config.out_dir + "/results.csv", csv);
    for (const auto& [name, t] : ctx.tables) write_csv(config.out_dir + "/" + name + ".csv", t);
    std::map<std::string, int> count;
    for (const auto& [name, p] : ctx.plots) {
      int k = count[name]++;
      std::string svg = config.out_dir + "/" + name + (k ? "_" + std::to_string(k) : "") + ".svg";
      plot_csv(config.out_dir + "/" + name + ".csv", svg, p);
    }
    Json doc;
    doc["experiment"] = info.id;
    doc["criterion"] = info.criterion;
    doc["anchor"] = info.anchor;
    doc["description"] = info.description;
    doc["config"] = res.resolved;
    doc["pass"] = res.pass();
    doc["runtime"] = rt;
    doc["extra"] = ctx.extra;
    Json recs = Json::array();
    for (const auto& r : res.records) recs.push_back(to_json(r));
    doc["records"] = recs;
    write_json(config.out_dir + "/results.json", doc);
  }
  return res;
}

std::vector<ReportRow> build_report(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) throw Error("report: missing directory " + dir);
  std::map<int, ReportRow> rows;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "results.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Json doc = read_json(f.string());
    int c = doc.at("criterion").get<int>();
    ReportRow& r = rows[c];
    r.criterion = c;
    std::string id = doc.at("experiment").get<std::string>();
    r.experiments += (r.experiments.empty() ? "" : " ") + id;
    if (r.anchor.empty()) r.anchor = doc.value("anchor", "");
    r.runtime += doc.value("runtime", 0.0);
    for (const auto& rj : doc.at("records")) {
      ResultRecord rec = record_from_json(rj);
      ++r.records;
      if (rec.hard && !rec.pass) {
        ++r.failed;
        r.pass = false;
      }
    }
  }
  std::vector<ReportRow> out;
  for (auto& [c, r] : rows) out.push_back(r);
  return out;
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::string s;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-9s %-6s %-8s %-9s %s\n", "criterion", "status", "records", "runtime_s", "experiments | anchor");
  s += buf;
  for (const auto& r : rows) {
    std::string label = r.criterion > 0 ? std::to_string(r.criterion) : "explore";
    std::snprintf(buf, sizeof buf, "%-9s %-6s %3d/%-4d %9.1f %s | %s%s\n", label.c_str(), r.pass ? "PASS" : "FAIL",
                  r.records - r.failed, r.records, r.runtime, r.experiments.c_str(), r.anchor.c_str(),
                  r.pass ? "" : "  <-- failed");
    s += buf;
  }
  return s;
}

std::string format_records(const RunResult& res) {
  std::string s;
  char buf[768];
  for (const auto& r : res.records) {
    std::string cond;
    switch (r.check) {
      case Check::le: cond = "<= " + format_double(r.target); break;
      case Check::lt: cond = "< " + format_double(r.target); break;
      case Check::ge: cond = ">= " + format_double(r.target); break;
      case Check::gt: cond = "> " + format_double(r.target); break;
      case Check::abs_le: cond = "|v - " + format_double(r.target) + "| <= " + format_double(r.tolerance); break;
      case Check::in_range: cond = "in [" + format_double(r.lo) + ", " + format_double(r.hi) + "]"; break;
      case Check::in_range_mc:
        cond = "in [" + format_double(r.lo) + ", " + format_double(r.hi) + "] within 2 se, se <= " + format_double(r.tolerance);
        break;
      case Check::info: cond = "diagnostic"; break;
    }
    const char* status = r.check == Check::info ? "INFO" : (r.pass ? "PASS" : (r.hard ? "FAIL" : "SOFT-FAIL"));
    std::snprintf(buf, sizeof buf, "  [%s] %s = %.6g", status, r.metric.c_str(), r.value);
    s += buf;
    if (r.error != 0.0 && r.check != Check::abs_le) {
      std::snprintf(buf, sizeof buf, " +- %.3g", r.error);
      s += buf;
    }
    s += "  (" + cond + ")";
    if (!r.note.empty()) s += "  " + r.note;
    s += "\n";
  }
  std::snprintf(buf, sizeof buf, "  %s %s in %.1f s\n", res.experiment.c_str(), res.pass() ? "passed" : "FAILED", res.runtime);
  s += buf;
  return s;
}

}  // namespace fc
