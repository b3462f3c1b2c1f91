// fracchain <subcommand> --config <file> [--seed N] [--out DIR] [--set key=value]...
// fracchain report DIR
// fracchain list

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <map>

#include "fracchain/experiments.hpp"

namespace {

// "key=value"; the value is parsed as JSON when possible, kept as a string otherwise
void apply_override(fc::Json& params, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw fc::ConfigError("--set expects key=value, got '" + kv + "'");
  std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  fc::Json v = fc::Json::parse(val, nullptr, false);
  if (v.is_discarded()) v = val;
  params[key] = v;
}

int run_one(const std::string& sub, const std::string& config, const std::string& experiment, long long seed,
            const std::string& out, const std::vector<std::string>& sets, bool dump) {
  fc::Json j;
  if (!config.empty()) {
    try {
      j = fc::read_json(config);
    } catch (const std::exception& e) {
      throw fc::ConfigError(e.what());
    }
  } else if (!experiment.empty()) {
    j = {{"experiment", experiment}};
  } else {
    throw fc::ConfigError("--config or --experiment is required");
  }
  if (!j.is_object()) throw fc::ConfigError("config must be a JSON object");
  if (!experiment.empty()) j["experiment"] = experiment;
  if (sub != "run") {
    if (j.contains("subcommand") && j["subcommand"] != sub && j["subcommand"] != "run")
      throw fc::ConfigError("config is for subcommand '" + j["subcommand"].get<std::string>() + "'");
    j["subcommand"] = sub;
  }
  if (seed >= 0) j["seed"] = seed;
  if (!out.empty()) j["out"] = out;
  if (!sets.empty()) {
    fc::Json p = j.contains("params") ? j["params"] : fc::Json::object();
    for (const auto& s : sets) apply_override(p, s);
    j["params"] = p;
  }
  fc::ExperimentConfig cfg = fc::parse_config(j);
  if (dump) {
    const fc::ExperimentInfo& info = fc::find_experiment(cfg.experiment);
    fc::Json d{{"experiment", info.id}, {"subcommand", info.subcommand}, {"description", info.description}, {"seed", cfg.seed}};
    fc::Json p = info.defaults, t = info.tolerances;
    for (auto it = cfg.params.begin(); it != cfg.params.end(); ++it) p[it.key()] = it.value();
    for (auto it = cfg.tolerances.begin(); it != cfg.tolerances.end(); ++it) t[it.key()] = it.value();
    d["params"] = p;
    d["tolerances"] = t;
    std::cout << d.dump(2) << "\n";
    return 0;
  }
  fc::RunResult r = fc::run_config(cfg);
  std::cout << fc::format_records(r);
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracchain: experiments on fractional Gaussian chains and integer-valued fields"};
  app.require_subcommand(1);
  struct Opts {
    std::string config, experiment, out;
    long long seed = -1;
    std::vector<std::string> sets;
    bool dump = false;
  };
  std::map<std::string, Opts> opts;
  std::vector<std::string> names = fc::subcommands();
  names.push_back("run");
  for (const auto& name : names) {
    Opts& o = opts[name];
    CLI::App* s = app.add_subcommand(name, name == "run" ? "run any experiment config" : "run a '" + name + "' experiment");
    s->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    s->add_option("--experiment", o.experiment, "experiment id, defaults without a config");
    s->add_option("--seed", o.seed, "override the seed")->check(CLI::NonNegativeNumber);
    s->add_option("--out", o.out, "output directory");
    s->add_option("--set", o.sets, "override a parameter, key=value");
    s->add_flag("--dump-config", o.dump, "print the resolved config and exit");
  }
  std::string report_dir;
  CLI::App* rep = app.add_subcommand("report", "summarize every results.json under a directory");
  rep->add_option("dir", report_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  CLI::App* list = app.add_subcommand("list", "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) {
      auto rows = fc::build_report(report_dir);
      std::cout << fc::format_report(rows);
      for (const auto& r : rows)
        if (!r.pass) return 1;
      return 0;
    }
    if (list->parsed()) {
      for (const auto& e : fc::registry())
        std::printf("%-26s %-15s %2d  %s\n", e.id.c_str(), e.subcommand.c_str(), e.criterion, e.description.c_str());
      return 0;
    }
    for (auto* s : app.get_subcommands()) {
      const Opts& o = opts[s->get_name()];
      return run_one(s->get_name(), o.config, o.experiment, o.seed, o.out, o.sets, o.dump);
    }
  } catch (const fc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
