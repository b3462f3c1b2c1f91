#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fracchain/experiments.hpp"

using namespace fc;
namespace fs = std::filesystem;

#ifndef FRACCHAIN_SOURCE_DIR
#define FRACCHAIN_SOURCE_DIR "."
#endif

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("registry covers every criterion") {
  std::set<std::string> ids;
  for (const auto& e : registry()) CHECK(ids.insert(e.id).second);
  for (int c = 1; c <= 15; ++c) CHECK(!experiments_for_criterion(c).empty());
  auto subs = subcommands();
  for (const auto& e : registry()) CHECK(std::find(subs.begin(), subs.end(), e.subcommand) != subs.end());
  CHECK_THROWS_AS(find_experiment("nope"), ConfigError);
}

TEST_CASE("config schema") {
  CHECK_NOTHROW(parse_config(Json{{"experiment", "spitzer-vs-dp"}}));
  CHECK_THROWS_AS(parse_config(Json::array()), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"params", {{"R", 2.5}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"params", {{"Q", 2}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"subcommand", "walk"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"seed", -3}}), ConfigError);
  ExperimentConfig c = parse_config(Json{{"experiment", "spitzer-vs-dp"}, {"seed", 7}, {"params", {{"R", 10}}},
                                         {"tolerances", {{"budget_max", 1e-3}}}});
  CHECK(c.seed == 7);
  CHECK(c.params["R"] == 10);
}

TEST_CASE("every checked-in config parses") {
  fs::path dir = fs::path(FRACCHAIN_SOURCE_DIR) / "experiments";
  REQUIRE(fs::exists(dir));
  int n = 0;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.path().extension() != ".json") continue;
    CAPTURE(f.path().string());
    CHECK_NOTHROW(load_config(f.path().string()));
    ++n;
  }
  CHECK(n >= 15);
}

TEST_CASE("runs are byte-reproducible and self-describing") {
  fs::path a = fresh_dir("fc_exp_a"), b = fresh_dir("fc_exp_b");
  Json j{{"experiment", "first-return-exponent"}, {"seed", 3}, {"params", {{"horizon", 4096}, {"n_min", 64}}}};
  j["out"] = a.string();
  RunResult ra = run_config(parse_config(j));
  j["out"] = b.string();
  RunResult rb = run_config(parse_config(j));
  CHECK(ra.records.size() == 4);
  for (const char* f : {"results.csv", "first_return.csv", "first_return.svg"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  Json doc = read_json((a / "results.json").string());
  CHECK(doc["config"]["params"]["horizon"] == 4096);
  CHECK(doc["config"]["params"].contains("s_values"));
  CHECK(doc["records"].size() == ra.records.size());
  ResultRecord back = record_from_json(doc["records"][0]);
  CHECK(back.metric == ra.records[0].metric);
  CHECK(back.value == ra.records[0].value);
  CHECK(format_records(ra).find("first-return-exponent") != std::string::npos);
}

TEST_CASE("report") {
  fs::path empty = fresh_dir("fc_report_empty");
  fs::create_directories(empty);
  CHECK(build_report(empty.string()).empty());
  CHECK_THROWS(build_report((empty / "missing").string()));

  fs::path d = fresh_dir("fc_report");
  Json ok{{"experiment", "renewal-bound"}, {"params", {{"horizon", 8192}}}, {"out", (d / "ok").string()}};
  run_config(parse_config(ok));
  Json bad{{"experiment", "first-return-exponent"},
           {"params", {{"horizon", 2048}, {"n_min", 64}}},
           {"tolerances", {{"exponent", 1e-9}}},
           {"out", (d / "bad").string()}};
  RunResult rb = run_config(parse_config(bad));
  CHECK(!rb.pass());
  auto rows = build_report(d.string());
  REQUIRE(rows.size() == 2);
  std::set<int> crit;
  for (const auto& r : rows) {
    crit.insert(r.criterion);
    if (r.criterion == 3) CHECK(!r.pass);
    if (r.criterion == 15) CHECK(r.pass);
  }
  CHECK(crit == std::set<int>{3, 15});
  std::string txt = format_report(rows);
  CHECK(txt.find("FAIL") != std::string::npos);
}
