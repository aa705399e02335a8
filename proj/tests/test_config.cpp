#include <doctest.h>

#include <nlohmann/json.hpp>

#include "pump/config.hpp"

using namespace pump;
using nlohmann::json;

namespace {
json pump_cfg() {
  return json::parse(R"({
    "task": "index",
    "seed": 7,
    "group": {"kind": "U1"},
    "geometry": {"sites": 8, "local_dim": 3, "boundary": "ring"},
    "loop": {"type": "example_pump", "h": 1},
    "index": {"cut": 0, "method": "both"}
  })");
}
}  // namespace

TEST_CASE("config round trip drives the index pipeline") {
  ExperimentConfig cfg = parse_config(pump_cfg());
  CHECK(cfg.task == "index");
  CHECK(cfg.group.to_string() == "U(1)");
  json report = run_experiment(cfg);
  CHECK(report["report"]["index"]["components"] == std::vector<long>{1});
  CHECK(report["report"]["closure"]["pass"].get<bool>());
  CHECK(report.contains("config_hash"));
}

TEST_CASE("determinism: identical config and seed give identical reports") {
  ExperimentConfig cfg = parse_config(pump_cfg());
  json a = run_experiment(cfg);
  json b = run_experiment(cfg);
  a.erase("runtime_s");
  b.erase("runtime_s");
  a["report"].erase("runtime_s");
  b["report"].erase("runtime_s");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("schema violations carry JSON-pointer-ish locations") {
  json bad = pump_cfg();
  bad.erase("group");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  try {
    parse_config(bad);
  } catch (const ConfigError& e) {
    CHECK(e.pointer.find("/group") != std::string::npos);
  }

  json bad2 = pump_cfg();
  bad2["loop"]["type"] = "unknown";
  CHECK_THROWS_AS(parse_config(bad2), ConfigError);

  json bad3 = pump_cfg();
  bad3["index"]["method"] = "telepathy";
  CHECK_THROWS_AS(parse_config(bad3), ConfigError);
}

TEST_CASE("constructor tree: concat, reverse, stack, dress parse and run") {
  json cfg_json = pump_cfg();
  cfg_json["geometry"]["sites"] = 6;
  cfg_json["loop"] = json::parse(R"({
    "type": "concat",
    "first": {"type": "example_pump_multiple", "h": 1, "multiple": 1},
    "second": {"type": "time_reverse",
               "of": {"type": "example_pump_multiple", "h": 1, "multiple": 1}}
  })");
  ExperimentConfig cfg = parse_config(cfg_json);
  json report = run_experiment(cfg);
  CHECK(report["report"]["index"]["components"] == std::vector<long>{0});

  json dress_json = pump_cfg();
  dress_json["geometry"]["boundary"] = "open";
  dress_json["loop"] =
      json::parse(R"({"type": "dress", "strength": 0.1, "site": 0,
                      "of": {"type": "example_pump", "h": 1}})");
  ExperimentConfig dcfg = parse_config(dress_json);
  json dreport = run_experiment(dcfg);
  CHECK(dreport["report"]["index"]["components"] == std::vector<long>{1});
}

TEST_CASE("verify task emits rows") {
  json v;
  v["task"] = "verify";
  v["suite"] = "constant";
  ExperimentConfig cfg = parse_config(v);
  json report = run_experiment(cfg);
  CHECK(report["all_pass"].get<bool>());
  CHECK(report["rows"].size() > 0);
}
