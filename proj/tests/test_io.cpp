#include <chrono>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "crisk/estimators.hpp"
#include "crisk/io.hpp"
#include "crisk/sim.hpp"

using namespace crisk;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "crisk_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string tmp_file(const std::string& name) { return (tmp_dir() / name).string(); }

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST_CASE("dataset CSV roundtrip preserves every field") {
  SimConfig cfg;
  cfg.n = 50;
  cfg.seed = 81;
  const Replication rep = generate_replication(cfg, 0);
  const std::string path = tmp_file("roundtrip.csv");
  save_dataset(rep.data, &rep.truth, path);
  const LoadedDataset loaded = load_dataset(path);
  REQUIRE(loaded.truth.has_value());
  REQUIRE(loaded.data.size() == rep.data.size());
  CHECK(loaded.data.n_covariates == rep.data.n_covariates);
  CHECK(loaded.data.n_risks == rep.data.n_risks);
  for (std::size_t i = 0; i < rep.data.size(); ++i) {
    CHECK(loaded.data.subjects[i].id == rep.data.subjects[i].id);
    CHECK(loaded.data.subjects[i].time == rep.data.subjects[i].time);
    CHECK(loaded.data.subjects[i].event == rep.data.subjects[i].event);
    CHECK(loaded.data.subjects[i].group == rep.data.subjects[i].group);
    CHECK(loaded.data.subjects[i].covariates == rep.data.subjects[i].covariates);
    CHECK((*loaded.truth)[i].w1 == rep.truth[i].w1);
    CHECK((*loaded.truth)[i].latent_time == rep.truth[i].latent_time);
    CHECK((*loaded.truth)[i].censor_time == rep.truth[i].censor_time);
  }
}

TEST_CASE("truth table CSV roundtrip") {
  SimConfig cfg;
  cfg.n = 20;
  cfg.seed = 82;
  const Replication rep = generate_replication(cfg, 0);
  const std::string dpath = tmp_file("truth_data.csv");
  const std::string tpath = tmp_file("truth_table.csv");
  save_dataset(rep.data, nullptr, dpath);
  save_truth(rep.truth, rep.data, tpath);
  const LoadedDataset loaded = load_dataset(dpath);
  CHECK_FALSE(loaded.truth.has_value());
  const GroundTruth truth = load_truth(tpath, loaded.data);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(truth[i].w1 == rep.truth[i].w1);
    CHECK(truth[i].wc == rep.truth[i].wc);
    CHECK(truth[i].latent_cause == rep.truth[i].latent_cause);
  }
}

TEST_CASE("dataset loading errors carry locations") {
  SECTION("negative event code names the row") {
    const std::string path = tmp_file("bad_event.csv");
    write_lines(path, {"id,time,event,group,x0", "a,1.0,1,0,0.5", "b,2.0,-1,1,0.3"});
    CHECK_THROWS_WITH(load_dataset(path),
                      Catch::Matchers::ContainsSubstring("row 3"));
  }
  SECTION("unparseable time names the row and field") {
    const std::string path = tmp_file("bad_time.csv");
    write_lines(path, {"id,time,event,group,x0", "a,oops,1,0,0.5"});
    CHECK_THROWS_WITH(load_dataset(path), Catch::Matchers::ContainsSubstring("time"));
  }
  SECTION("missing required column") {
    const std::string path = tmp_file("no_group.csv");
    write_lines(path, {"id,time,event,x0", "a,1.0,1,0.5"});
    CHECK_THROWS_WITH(load_dataset(path),
                      Catch::Matchers::ContainsSubstring("group"));
  }
  SECTION("empty file") {
    const std::string path = tmp_file("empty.csv");
    write_lines(path, {});
    CHECK_THROWS_AS(load_dataset(path), DataError);
  }
  SECTION("header only") {
    const std::string path = tmp_file("header_only.csv");
    write_lines(path, {"id,time,event,group"});
    CHECK_THROWS_WITH(load_dataset(path),
                      Catch::Matchers::ContainsSubstring("no data rows"));
  }
  SECTION("non-contiguous covariates") {
    const std::string path = tmp_file("gap.csv");
    write_lines(path, {"id,time,event,group,x0,x2", "a,1,1,0,0.5,0.7"});
    CHECK_THROWS_AS(load_dataset(path), DataError);
  }
  SECTION("expected covariate count mismatch") {
    const std::string path = tmp_file("wrong_p.csv");
    write_lines(path, {"id,time,event,group,x0", "a,1,1,0,0.5"});
    CHECK_THROWS_AS(load_dataset(path, 3), DataError);
  }
}

TEST_CASE("three-row file loads") {
  const std::string path = tmp_file("three.csv");
  write_lines(path, {"id,time,event,group,x0", "a,1.0,1,0,0.1", "b,2.5,0,1,-0.2",
                     "c,0.5,2,0,0.3"});
  const LoadedDataset loaded = load_dataset(path);
  CHECK(loaded.data.size() == 3);
  CHECK(loaded.data.n_risks == 2);
  CHECK(loaded.data.n_covariates == 1);
}

TEST_CASE("model JSON roundtrips preserve predictions") {
  SimConfig cfg;
  cfg.n = 600;
  cfg.seed = 83;
  const Replication rep = generate_replication(cfg, 0);
  RandomStream rng(84);

  auto check_roundtrip = [&](const FittedModel& model, const std::string& name) {
    const std::string path = tmp_file(name);
    save_model(model, path);
    const LoadedModel loaded = load_model(path);
    CHECK(model_kind(loaded.model) == model_kind(model));
    CHECK(model_cause(loaded.model) == model_cause(model));
    for (int trial = 0; trial < 100; ++trial) {
      const auto& x =
          rep.data.subjects[rng.below(rep.data.size())].covariates;
      const double t = 3 * rng.uniform01();
      CHECK_THAT(predict_cif(loaded.model, x, t),
                 Catch::Matchers::WithinAbs(predict_cif(model, x, t), 1e-15));
    }
  };

  check_roundtrip(fit_cox(rep.data, 1), "model_cox.json");
  check_roundtrip(fit_fine_gray(rep.data, 1), "model_fg.json");
  check_roundtrip(CurveModel{"km", 1, kaplan_meier(rep.data, 1)}, "model_km.json");
  check_roundtrip(CurveModel{"aj", 1, aalen_johansen(rep.data, 1)}, "model_aj.json");
}

TEST_CASE("model loading errors") {
  SECTION("truncated file parses into an error, not a crash") {
    const std::string path = tmp_file("truncated.json");
    write_lines(path, {"{\"schema_version\": 1, \"model_kind\": \"cox"});
    CHECK_THROWS_AS(load_model(path), DataError);
  }
  SECTION("unknown model kind") {
    const std::string path = tmp_file("unknown_kind.json");
    json j;
    j["schema_version"] = kModelSchemaVersion;
    j["model_kind"] = "gradient_boosted_cox";
    j["cause"] = 1;
    j["beta"] = std::vector<double>{};
    j["baseline"] = {{"initial_value", 0.0},
                     {"jump_times", std::vector<double>{}},
                     {"values", std::vector<double>{}}};
    write_json_file(j, path);
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("unknown model_kind"));
  }
  SECTION("schema version mismatch") {
    const std::string path = tmp_file("old_schema.json");
    json j;
    j["schema_version"] = 999;
    j["model_kind"] = "cox";
    j["cause"] = 1;
    write_json_file(j, path);
    CHECK_THROWS_WITH(load_model(path),
                      Catch::Matchers::ContainsSubstring("schema_version"));
  }
}

TEST_CASE("config parsing") {
  SECTION("full config") {
    const std::string path = tmp_file("full.ini");
    write_lines(path, {"# study configuration",
                       "[sim]",
                       "n = 5000",
                       "p = 12",
                       "sigma_k = 0.5",
                       "group_center = 2.0,1.0",
                       "seed = 99",
                       "replications = 4",
                       "",
                       "[study]",
                       "cause = 2",
                       "horizons = q0.25,q1,t3.5",
                       "split = 0.75",
                       "group = x3>=0",
                       "",
                       "[policy]",
                       "threshold = 0.2",
                       "horizon = t10",
                       "age_col = x4",
                       "min_age = 45"});
    const StudyConfig cfg = parse_config(path);
    CHECK(cfg.sim.n == 5000);
    CHECK(cfg.sim.p == 12);
    CHECK(cfg.sim.sigma_k == 0.5);
    CHECK(cfg.sim.group_center[0] == 2.0);
    CHECK(cfg.sim.seed == 99);
    CHECK(cfg.sim.replications == 4);
    CHECK(cfg.cause == 2);
    REQUIRE(cfg.horizons.size() == 3);
    CHECK(cfg.horizons[0].is_quantile);
    CHECK(cfg.horizons[0].value == 0.25);
    CHECK_FALSE(cfg.horizons[2].is_quantile);
    CHECK(cfg.horizons[2].value == 3.5);
    CHECK(cfg.split_fraction == 0.75);
    CHECK(cfg.group_column == "x3>=0");
    CHECK(cfg.policy_threshold == 0.2);
    CHECK(cfg.policy_age_col == "x4");
    CHECK(cfg.policy_min_age == 45);
  }
  SECTION("unknown keys are rejected with their line") {
    const std::string path = tmp_file("bad_key.ini");
    write_lines(path, {"[sim]", "banana = 3"});
    CHECK_THROWS_WITH(parse_config(path),
                      Catch::Matchers::ContainsSubstring("line 2"));
  }
  SECTION("horizon tokens validate") {
    CHECK_THROWS_AS(parse_horizon_token("q1.5"), DataError);
    CHECK_THROWS_AS(parse_horizon_token("t-1"), DataError);
    CHECK_THROWS_AS(parse_horizon_token("zebra"), DataError);
    CHECK(parse_horizon_token("0.5").is_quantile);  // bare numbers are quantiles
    CHECK(parse_horizon_token("t2").label == "t2");
  }
}

TEST_CASE("default-scale dataset writes and reloads quickly") {
  SimConfig cfg;  // n = 30000
  cfg.seed = 85;
  const Replication rep = generate_replication(cfg, 0);
  const std::string path = tmp_file("large.csv");
  const auto start = std::chrono::steady_clock::now();
  save_dataset(rep.data, &rep.truth, path);
  const LoadedDataset loaded = load_dataset(path);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(loaded.data.size() == 30000);
  CHECK(secs < 5.0);
}
