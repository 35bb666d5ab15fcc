// crisk command-line driver: simulate | fit | discrepancy | evaluate |
// decide | report. Exit codes: 0 success, 2 usage, 3 data error, 4 numerical
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crisk/decision.hpp"
#include "crisk/discrepancy.hpp"
#include "crisk/estimators.hpp"
#include "crisk/io.hpp"
#include "crisk/metrics.hpp"
#include "crisk/sim.hpp"
#include "crisk/study.hpp"

namespace fs = std::filesystem;
using crisk::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

crisk::StudyConfig load_config(const CommonOpts& opts) {
  crisk::StudyConfig cfg;
  if (!opts.config_path.empty()) cfg = crisk::parse_config(opts.config_path);
  if (opts.seed) cfg.sim.seed = *opts.seed;
  return cfg;
}

std::string basename_of(const std::string& path) {
  return fs::path(path).filename().string();
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOpts& common, const std::string& out_dir, int jobs,
                 std::optional<int> n_override, std::optional<int> reps_override) {
  crisk::StudyConfig cfg = load_config(common);
  if (n_override) cfg.sim.n = *n_override;
  if (reps_override) cfg.sim.replications = *reps_override;
  cfg.sim.validate();
  fs::create_directories(out_dir);

  crisk::RunManifest manifest((fs::path(out_dir) / "manifest.json").string(),
                              cfg.sim);
  crisk::run_parallel(cfg.sim.replications, jobs, [&](int k) {
    const auto start = std::chrono::steady_clock::now();
    const crisk::Replication rep = crisk::generate_replication(cfg.sim, k);
    const std::string data_path =
        (fs::path(out_dir) / ("data_" + std::to_string(k) + ".csv")).string();
    const std::string truth_path =
        (fs::path(out_dir) / ("truth_" + std::to_string(k) + ".csv")).string();
    crisk::save_dataset(rep.data, nullptr, data_path);
    crisk::save_truth(rep.truth, rep.data, truth_path);
    std::size_t censored = 0;
    for (const crisk::Subject& s : rep.data.subjects)
      if (s.event == crisk::kCensored) ++censored;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    manifest.add_replication(
        k, basename_of(data_path), basename_of(truth_path),
        static_cast<double>(censored) / static_cast<double>(rep.data.size()),
        elapsed);
  });
  std::printf("simulate: wrote %d replication(s) to %s\n", cfg.sim.replications,
              out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const std::string& data_path, const std::string& model_name, int cause,
            const std::string& out_path, std::uint64_t seed, double split_fraction) {
  const crisk::LoadedDataset loaded = crisk::load_dataset(data_path);
  const crisk::SplitIndices split =
      crisk::split_indices(loaded.data.size(), split_fraction, seed);
  const crisk::SurvivalDataset dev = crisk::subset_dataset(loaded.data, split.dev);

  crisk::FittedModel model;
  if (model_name == "cox") {
    model = crisk::fit_cox(dev, cause);
  } else if (model_name == "finegray") {
    model = crisk::fit_fine_gray(dev, cause);
  } else if (model_name == "km") {
    model = crisk::CurveModel{"km", cause, crisk::kaplan_meier(dev, cause)};
  } else {
    model = crisk::CurveModel{"aj", cause, crisk::aalen_johansen(dev, cause)};
  }
  json meta;
  meta["data_file"] = basename_of(data_path);
  meta["n_total"] = loaded.data.size();
  meta["n_dev"] = dev.size();
  meta["p"] = dev.n_covariates;
  meta["split_seed"] = seed;
  meta["split_fraction"] = split_fraction;
  crisk::save_model(model, out_path, meta);
  std::printf("fit: %s (cause %d) on %zu/%zu subjects -> %s\n", model_name.c_str(),
              cause, dev.size(), loaded.data.size(), out_path.c_str());
  return 0;
}

// Reconstructs the held-out split recorded in a model's metadata; models
// without split metadata evaluate on the full dataset.
crisk::SplitIndices split_from_meta(const json& meta, std::size_t n) {
  if (!meta.contains("split_seed") || !meta.contains("split_fraction")) {
    crisk::SplitIndices full;
    for (std::size_t i = 0; i < n; ++i) full.test.push_back(i);
    return full;
  }
  return crisk::split_indices(n, meta.at("split_fraction").get<double>(),
                              meta.at("split_seed").get<std::uint64_t>());
}

void check_split_agreement(const json& meta_a, const json& meta_b) {
  const bool has_a = meta_a.contains("split_seed");
  const bool has_b = meta_b.contains("split_seed");
  if (has_a != has_b)
    throw crisk::DataError("models disagree on the development/test split");
  if (has_a && (meta_a.at("split_seed") != meta_b.at("split_seed") ||
                meta_a.at("split_fraction") != meta_b.at("split_fraction")))
    throw crisk::DataError("models were fitted with different splits");
}

// ---------------------------------------------------------------------------
// discrepancy
// ---------------------------------------------------------------------------

int cmd_discrepancy(const std::string& data_path, const std::string& truth_path,
                    const std::string& model_nc_path, const std::string& model_c_path,
                    const std::string& horizons_list, const std::string& out_prefix) {
  const crisk::LoadedDataset loaded = crisk::load_dataset(data_path);
  crisk::GroundTruth truth;
  if (!truth_path.empty()) {
    truth = crisk::load_truth(truth_path, loaded.data);
  } else if (loaded.truth) {
    truth = *loaded.truth;
  } else {
    throw crisk::DataError("no ground truth: pass --truth or embed truth columns");
  }
  const crisk::LoadedModel nc = crisk::load_model(model_nc_path);
  const crisk::LoadedModel c = crisk::load_model(model_c_path);
  const int cause = crisk::model_cause(nc.model);
  if (cause != crisk::model_cause(c.model))
    throw crisk::DataError("models target different causes");
  check_split_agreement(nc.meta, c.meta);
  const crisk::SplitIndices split = split_from_meta(nc.meta, loaded.data.size());

  const auto horizons =
      crisk::compute_horizons(loaded.data, crisk::parse_horizon_list(horizons_list));
  const crisk::SurvivalDataset test = crisk::subset_dataset(loaded.data, split.test);
  std::vector<const crisk::GroundTruthRow*> truth_rows;
  std::vector<int> groups;
  for (std::size_t i : split.test) {
    truth_rows.push_back(&truth[i]);
    groups.push_back(loaded.data.subjects[i].group);
  }

  json out;
  out["schema_version"] = 1;
  out["model_nc"] = crisk::model_kind(nc.model);
  out["model_c"] = crisk::model_kind(c.model);
  out["data"] = basename_of(data_path);
  out["cause"] = cause;
  out["n_test"] = test.size();
  out["notes"] = json::array(
      {"theoretical_L normalizes by the marginal P(T1 < t) computed from the "
       "per-subject ground-truth hazards",
       "quantile horizons are computed over the full replication's uncensored "
       "observed event times"});
  out["reports"] = json::array();

  std::string csv =
      "horizon,t,cause,n_test,empirical_mean,theoretical_mean,"
      "group0_empirical,group1_empirical,group0_theoretical,group1_theoretical,"
      "gap_empirical,gap_theoretical\n";
  for (const crisk::Horizon& h : horizons) {
    const std::vector<double> f_nc = crisk::predict_vector(nc.model, test, h.t);
    const std::vector<double> f_c = crisk::predict_vector(c.model, test, h.t);
    const crisk::DiscrepancyReport rep =
        crisk::make_discrepancy_report(f_nc, f_c, truth_rows, groups, h, cause);
    out["reports"].push_back(crisk::discrepancy_report_to_json(rep));
    auto d = crisk::detail::format_double;
    csv += h.label + "," + d(h.t) + "," + std::to_string(cause) + "," +
           std::to_string(test.size()) + "," + d(rep.empirical_mean) + "," +
           d(rep.theoretical_mean) + "," + d(rep.group_empirical[0]) + "," +
           d(rep.group_empirical[1]) + "," + d(rep.group_theoretical[0]) + "," +
           d(rep.group_theoretical[1]) + "," + d(rep.gap_empirical) + "," +
           d(rep.gap_theoretical) + "\n";
  }
  crisk::write_json_file(out, out_prefix + ".json");
  crisk::write_text_file(csv, out_prefix + ".csv");
  std::printf("discrepancy: %zu horizon(s) -> %s.{json,csv}\n", horizons.size(),
              out_prefix.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& data_path, const std::string& model_c_path,
                 const std::string& model_nc_path, const std::string& horizons_list,
                 const std::string& group_col, const std::string& out_prefix) {
  const crisk::LoadedDataset loaded = crisk::load_dataset(data_path);
  const crisk::LoadedModel c = crisk::load_model(model_c_path);
  const crisk::LoadedModel nc = crisk::load_model(model_nc_path);
  const int cause = crisk::model_cause(c.model);
  if (cause != crisk::model_cause(nc.model))
    throw crisk::DataError("models target different causes");
  check_split_agreement(nc.meta, c.meta);
  const crisk::SplitIndices split = split_from_meta(c.meta, loaded.data.size());
  const auto horizons =
      crisk::compute_horizons(loaded.data, crisk::parse_horizon_list(horizons_list));
  const crisk::SurvivalDataset test = crisk::subset_dataset(loaded.data, split.test);
  const std::vector<int> groups = crisk::parse_grouping(test, group_col);

  json out;
  out["schema_version"] = 1;
  out["model_c"] = crisk::model_kind(c.model);
  out["model_nc"] = crisk::model_kind(nc.model);
  out["cause"] = cause;
  out["group"] = group_col;
  out["n_test"] = test.size();
  out["horizons"] = json::array();

  std::string csv = "model,horizon,t,group,td_brier,td_ci\n";
  auto d = crisk::detail::format_double;
  for (const crisk::Horizon& h : horizons) {
    const std::vector<double> pred_c = crisk::predict_vector(c.model, test, h.t);
    const std::vector<double> pred_nc = crisk::predict_vector(nc.model, test, h.t);
    const crisk::EvalReport all_c =
        crisk::evaluate_predictions(pred_c, test, h, cause);
    const crisk::EvalReport all_nc =
        crisk::evaluate_predictions(pred_nc, test, h, cause);
    const crisk::GroupEvalReport g =
        crisk::group_metric_diff(pred_c, pred_nc, test, h, cause, groups);

    json jh;
    jh["horizon"] = crisk::horizon_to_json(h);
    jh["overall"] = {{"competing", {{"td_brier", all_c.td_brier}, {"td_ci", all_c.td_ci}}},
                     {"noncompeting",
                      {{"td_brier", all_nc.td_brier}, {"td_ci", all_nc.td_ci}}}};
    jh["per_group"] = {{"brier_competing", g.brier_c},
                       {"brier_noncompeting", g.brier_nc},
                       {"ci_competing", g.ci_c},
                       {"ci_noncompeting", g.ci_nc},
                       {"brier_diff", g.brier_diff},
                       {"ci_diff", g.ci_diff}};
    jh["gap_change"] = {{"td_brier", g.brier_gap_change}, {"td_ci", g.ci_gap_change}};
    out["horizons"].push_back(jh);

    csv += "competing," + h.label + "," + d(h.t) + ",all," + d(all_c.td_brier) +
           "," + d(all_c.td_ci) + "\n";
    csv += "noncompeting," + h.label + "," + d(h.t) + ",all," +
           d(all_nc.td_brier) + "," + d(all_nc.td_ci) + "\n";
    for (int grp = 0; grp < 2; ++grp) {
      const auto gi = static_cast<std::size_t>(grp);
      csv += "competing," + h.label + "," + d(h.t) + "," + std::to_string(grp) +
             "," + d(g.brier_c[gi]) + "," + d(g.ci_c[gi]) + "\n";
      csv += "noncompeting," + h.label + "," + d(h.t) + "," + std::to_string(grp) +
             "," + d(g.brier_nc[gi]) + "," + d(g.ci_nc[gi]) + "\n";
    }
    csv += "gap_change," + h.label + "," + d(h.t) + ",all," +
           d(g.brier_gap_change) + "," + d(g.ci_gap_change) + "\n";
  }
  crisk::write_json_file(out, out_prefix + ".json");
  crisk::write_text_file(csv, out_prefix + ".csv");
  std::printf("evaluate: %zu horizon(s) -> %s.{json,csv}\n", horizons.size(),
              out_prefix.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

json crosstab_to_json(const crisk::DecisionCrossTab& tab) {
  return json{{"eligible", tab.eligible},
              {"treated_frac", tab.treated_frac},
              {"treated", {{"target", tab.cells[1][0]},
                           {"competing", tab.cells[1][1]},
                           {"none", tab.cells[1][2]}}},
              {"untreated", {{"target", tab.cells[0][0]},
                             {"competing", tab.cells[0][1]},
                             {"none", tab.cells[0][2]}}},
              {"overtreatment", tab.overtreatment},
              {"undertreatment", tab.undertreatment}};
}

void crosstab_to_csv(std::string& csv, const std::string& model,
                     const std::string& group, const crisk::DecisionCrossTab& tab) {
  auto d = crisk::detail::format_double;
  csv += model + "," + group + "," + std::to_string(tab.eligible) + "," +
         d(tab.treated_frac) + "," + d(tab.cells[1][0]) + "," + d(tab.cells[1][1]) +
         "," + d(tab.cells[1][2]) + "," + d(tab.cells[0][0]) + "," +
         d(tab.cells[0][1]) + "," + d(tab.cells[0][2]) + "," +
         d(tab.overtreatment) + "," + d(tab.undertreatment) + "\n";
}

int cmd_decide(const std::string& data_path, const std::string& model_c_path,
               const std::string& model_nc_path, double threshold,
               const std::string& age_col, double min_age,
               const std::string& horizon_token, const std::string& group_col,
               const std::string& out_prefix) {
  const crisk::LoadedDataset loaded = crisk::load_dataset(data_path);
  const crisk::LoadedModel c = crisk::load_model(model_c_path);
  const crisk::LoadedModel nc = crisk::load_model(model_nc_path);
  const int cause = crisk::model_cause(c.model);
  if (cause != crisk::model_cause(nc.model))
    throw crisk::DataError("models target different causes");
  check_split_agreement(nc.meta, c.meta);
  const crisk::SplitIndices split = split_from_meta(c.meta, loaded.data.size());
  const auto horizons = crisk::compute_horizons(
      loaded.data, {crisk::parse_horizon_token(horizon_token)});
  const crisk::SurvivalDataset test = crisk::subset_dataset(loaded.data, split.test);
  const std::vector<int> groups = crisk::parse_grouping(test, group_col);

  crisk::DecisionPolicy policy;
  policy.threshold = threshold;
  policy.horizon = horizons.front();
  policy.age_covariate = crisk::covariate_index(test, age_col);
  policy.age_name = age_col;
  policy.min_age = min_age;

  const std::vector<double> pred_c =
      crisk::predict_vector(c.model, test, policy.horizon.t);
  const std::vector<double> pred_nc =
      crisk::predict_vector(nc.model, test, policy.horizon.t);
  const crisk::DecisionReport rep =
      crisk::decision_report(pred_c, pred_nc, test, policy, groups, cause);

  json out;
  out["schema_version"] = 1;
  out["model_c"] = crisk::model_kind(c.model);
  out["model_nc"] = crisk::model_kind(nc.model);
  out["cause"] = cause;
  out["policy"] = {{"threshold", policy.threshold},
                   {"horizon", crisk::horizon_to_json(policy.horizon)},
                   {"age_col", age_col},
                   {"min_age", policy.min_age},
                   {"denominator", "age-eligible population (age > min_age)"}};
  out["group"] = group_col;
  out["overall"] = {{"competing", crosstab_to_json(rep.overall[0])},
                    {"noncompeting", crosstab_to_json(rep.overall[1])}};
  out["per_group"] = {
      {"competing",
       {crosstab_to_json(rep.per_group[0][0]), crosstab_to_json(rep.per_group[0][1])}},
      {"noncompeting",
       {crosstab_to_json(rep.per_group[1][0]), crosstab_to_json(rep.per_group[1][1])}}};

  std::string csv =
      "model,group,eligible,treated_frac,treated_target,treated_competing,"
      "treated_none,untreated_target,untreated_competing,untreated_none,"
      "overtreatment,undertreatment\n";
  crosstab_to_csv(csv, "competing", "all", rep.overall[0]);
  crosstab_to_csv(csv, "noncompeting", "all", rep.overall[1]);
  for (int g = 0; g < 2; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    crosstab_to_csv(csv, "competing", std::to_string(g), rep.per_group[0][gi]);
    crosstab_to_csv(csv, "noncompeting", std::to_string(g), rep.per_group[1][gi]);
  }
  crisk::write_json_file(out, out_prefix + ".json");
  crisk::write_text_file(csv, out_prefix + ".csv");
  std::printf("decide: horizon %s -> %s.{json,csv}\n",
              policy.horizon.label.c_str(), out_prefix.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const std::string& study_dir, const std::string& out_prefix,
               std::uint64_t seed) {
  if (!fs::is_directory(study_dir))
    throw crisk::DataError("'" + study_dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(study_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".json") continue;
    const json j = crisk::read_json_file(entry.path().string());
    if (j.contains("reports") && j.contains("model_nc") && j.contains("model_c"))
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2)
    throw crisk::DataError("need at least 2 replication reports in '" + study_dir +
                           "', found " + std::to_string(files.size()));

  // pair key -> horizon label -> reports across replications
  std::map<std::string, std::map<std::string, std::vector<crisk::DiscrepancyReport>>>
      grouped;
  std::map<std::string, std::vector<std::string>> horizon_order;
  for (const std::string& f : files) {
    const json j = crisk::read_json_file(f);
    const std::string key = j.at("model_nc").get<std::string>() + "-vs-" +
                            j.at("model_c").get<std::string>();
    for (const auto& rj : j.at("reports")) {
      const crisk::DiscrepancyReport rep = crisk::discrepancy_report_from_json(rj);
      auto& order = horizon_order[key];
      if (std::find(order.begin(), order.end(), rep.horizon.label) == order.end())
        order.push_back(rep.horizon.label);
      grouped[key][rep.horizon.label].push_back(rep);
    }
  }

  json out;
  out["schema_version"] = 1;
  out["replications"] = files.size();
  out["bootstrap_resamples"] = 1000;
  out["pairs"] = json::array();
  auto d = crisk::detail::format_double;

  // summary.csv: one row per model pair, horizon-labelled RMSE columns.
  // pairs.csv: one row per replication x horizon, for external plotting.
  std::string csv;
  std::string pairs_csv =
      "model_pair,horizon,replication,theoretical_L,empirical_L,"
      "theoretical_gap,empirical_gap\n";
  bool header_written = false;
  for (const auto& [key, by_horizon] : grouped) {
    json jp;
    jp["model_pair"] = key;
    jp["horizons"] = json::array();
    if (!header_written) {
      csv = "model_pair";
      for (const std::string& label : horizon_order[key])
        csv += ",rmse_L_" + label + ",rmse_L_sd_" + label + ",rmse_gap_" + label +
               ",rmse_gap_sd_" + label + ",slope_L_" + label + ",slope_gap_" +
               label;
      csv += "\n";
      header_written = true;
    }
    csv += key;
    for (const std::string& label : horizon_order[key]) {
      const auto& reps = by_horizon.at(label);
      const crisk::StudySummary summary = crisk::study_summary(reps, seed);
      jp["horizons"].push_back(crisk::study_summary_to_json(summary));
      csv += "," + d(summary.rmse_L) + "," + d(summary.rmse_L_sd) + "," +
             d(summary.rmse_gap) + "," + d(summary.rmse_gap_sd) + "," +
             d(summary.slope_L) + "," + d(summary.slope_gap);
      for (std::size_t r = 0; r < reps.size(); ++r)
        pairs_csv += key + "," + label + "," + std::to_string(r) + "," +
                     d(reps[r].theoretical_mean) + "," + d(reps[r].empirical_mean) +
                     "," + d(reps[r].gap_theoretical) + "," +
                     d(reps[r].gap_empirical) + "\n";
    }
    csv += "\n";
    out["pairs"].push_back(jp);
  }
  crisk::write_json_file(out, out_prefix + ".json");
  crisk::write_text_file(csv, out_prefix + ".csv");
  crisk::write_text_file(pairs_csv, out_prefix + "_pairs.csv");
  std::printf("report: %zu replication report(s) -> %s.{json,csv} and %s_pairs.csv\n",
              files.size(), out_prefix.c_str(), out_prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competing-risks survival toolkit: ground-truth simulation, "
               "naive vs competing-risk estimators, discrepancy and fairness "
               "reporting"};
  app.require_subcommand(1);

  CommonOpts common;

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate replicated synthetic datasets");
  std::string sim_out = "study";
  int sim_jobs = static_cast<int>(std::thread::hardware_concurrency());
  std::optional<int> sim_n, sim_reps;
  sim->add_option("--config", common.config_path, "config file (INI)");
  sim->add_option("--seed", common.seed, "seed override");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--jobs", sim_jobs, "worker threads");
  sim->add_option("--n", sim_n, "population size override");
  sim->add_option("--replications", sim_reps, "replication count override");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model on the development split");
  std::string fit_data, fit_model, fit_out;
  int fit_cause = 1;
  std::uint64_t fit_seed = 1;
  double fit_split = 0.8;
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  fit->add_option("--model", fit_model, "cox | finegray | km | aj")
      ->required()
      ->check(CLI::IsMember({"cox", "finegray", "km", "aj"}));
  fit->add_option("--cause", fit_cause, "target cause (default 1)");
  fit->add_option("--out", fit_out, "model JSON output")->required();
  fit->add_option("--seed", fit_seed, "split seed (default 1)");
  fit->add_option("--split", fit_split, "development fraction (default 0.8)");

  // discrepancy
  auto* disc = app.add_subcommand("discrepancy",
                                  "empirical vs theoretical discrepancy report");
  std::string disc_data, disc_truth, disc_nc, disc_c, disc_out;
  std::string disc_horizons = "q0.5,q1";
  disc->add_option("--data", disc_data, "dataset CSV")->required();
  disc->add_option("--truth", disc_truth, "ground-truth CSV");
  disc->add_option("--model-nc", disc_nc, "naive model JSON")->required();
  disc->add_option("--model-c", disc_c, "competing-risk model JSON")->required();
  disc->add_option("--horizons", disc_horizons,
                   "comma list, quantiles (q0.5) or times (t10)");
  disc->add_option("--out", disc_out, "output prefix")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "td-Brier / td-CI with group splits");
  std::string eval_data, eval_c, eval_nc, eval_out;
  std::string eval_horizons = "q0.5,q1";
  std::string eval_group = "group";
  eval->add_option("--data", eval_data, "dataset CSV")->required();
  eval->add_option("--model-c", eval_c, "competing-risk model JSON")->required();
  eval->add_option("--model-nc", eval_nc, "naive model JSON")->required();
  eval->add_option("--horizons", eval_horizons, "comma list of horizons");
  eval->add_option("--group", eval_group, "grouping: 'group' or e.g. 'x2>=50'");
  eval->add_option("--out", eval_out, "output prefix")->required();

  // decide
  auto* dec = app.add_subcommand("decide", "treatment-threshold analysis");
  std::string dec_data, dec_c, dec_nc, dec_out, dec_age;
  std::string dec_horizon = "q1";
  std::string dec_group = "group";
  double dec_threshold = 0.10, dec_min_age = 40;
  dec->add_option("--data", dec_data, "dataset CSV")->required();
  dec->add_option("--model-c", dec_c, "competing-risk model JSON")->required();
  dec->add_option("--model-nc", dec_nc, "naive model JSON")->required();
  dec->add_option("--threshold", dec_threshold, "risk threshold (default 0.10)");
  dec->add_option("--age-col", dec_age, "age covariate column, e.g. x2")->required();
  dec->add_option("--min-age", dec_min_age, "age gate, treat only age > min_age");
  dec->add_option("--horizon", dec_horizon, "policy horizon (default q1)");
  dec->add_option("--group", dec_group, "grouping for stratified tables");
  dec->add_option("--out", dec_out, "output prefix")->required();

  // report
  auto* rep = app.add_subcommand("report", "aggregate replication reports");
  std::string rep_dir, rep_out;
  std::uint64_t rep_seed = 1;
  rep->add_option("--study", rep_dir, "directory of discrepancy reports")->required();
  rep->add_option("--out", rep_out, "output prefix")->required();
  rep->add_option("--seed", rep_seed, "bootstrap seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(common, sim_out, sim_jobs, sim_n, sim_reps);
    if (fit->parsed())
      return cmd_fit(fit_data, fit_model, fit_cause, fit_out, fit_seed, fit_split);
    if (disc->parsed())
      return cmd_discrepancy(disc_data, disc_truth, disc_nc, disc_c, disc_horizons,
                             disc_out);
    if (eval->parsed())
      return cmd_evaluate(eval_data, eval_c, eval_nc, eval_horizons, eval_group,
                          eval_out);
    if (dec->parsed())
      return cmd_decide(dec_data, dec_c, dec_nc, dec_threshold, dec_age,
                        dec_min_age, dec_horizon, dec_group, dec_out);
    if (rep->parsed()) return cmd_report(rep_dir, rep_out, rep_seed);
  } catch (const crisk::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const crisk::NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
