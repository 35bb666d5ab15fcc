#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "crisk/decision.hpp"
#include "crisk/discrepancy.hpp"
#include "crisk/estimators.hpp"
#include "crisk/io.hpp"
#include "crisk/metrics.hpp"
#include "crisk/sim.hpp"
#include "crisk/types.hpp"

namespace crisk {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Development/test split. The permutation is a seeded Fisher-Yates shuffle,
// so any command given the same seed reconstructs the same split.
// ---------------------------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> dev, test;
};

inline SplitIndices split_indices(std::size_t n, double fraction,
                                  std::uint64_t seed) {
  if (n == 0) throw DataError("split: empty dataset");
  if (!(fraction > 0 && fraction < 1))
    throw DataError("split: fraction must lie in (0, 1)");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  RandomStream rng(seed, 0x73706C6974ULL);  // "split"
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.below(i + 1);
    std::swap(perm[i], perm[j]);
  }
  std::size_t n_dev = static_cast<std::size_t>(fraction * static_cast<double>(n) + 0.5);
  if (n >= 2) {
    if (n_dev < 1) n_dev = 1;
    if (n_dev > n - 1) n_dev = n - 1;
  }
  SplitIndices out;
  out.dev.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_dev));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_dev), perm.end());
  return out;
}

inline SurvivalDataset subset_dataset(const SurvivalDataset& data,
                                      const std::vector<std::size_t>& idx) {
  SurvivalDataset out;
  out.n_risks = data.n_risks;
  out.n_covariates = data.n_covariates;
  out.subjects.reserve(idx.size());
  for (std::size_t i : idx) out.subjects.push_back(data.subjects[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Horizons and groupings.
// ---------------------------------------------------------------------------

inline std::vector<Horizon> compute_horizons(const SurvivalDataset& data,
                                             const std::vector<HorizonSpec>& specs) {
  std::vector<Horizon> out;
  for (const HorizonSpec& s : specs) {
    if (s.is_quantile) {
      Horizon h = event_time_quantile(data, s.value);
      h.label = s.label;
      out.push_back(h);
    } else {
      out.push_back(Horizon{s.value, s.label});
    }
  }
  return out;
}

// Grouping spec: "group" uses the group label; "<col><op><value>" with op in
// {>=, >, <=, <} binarizes a covariate column, e.g. "x2>=0.5".
inline std::vector<int> parse_grouping(const SurvivalDataset& data,
                                       const std::string& spec) {
  std::vector<int> out(data.subjects.size());
  if (spec == "group") {
    for (std::size_t i = 0; i < data.subjects.size(); ++i)
      out[i] = data.subjects[i].group;
    return out;
  }
  static const char* ops[] = {">=", "<=", ">", "<"};
  std::string col, op;
  double value = 0;
  for (const char* o : ops) {
    const auto pos = spec.find(o);
    if (pos != std::string::npos) {
      col = spec.substr(0, pos);
      op = o;
      value = detail::parse_double(spec.substr(pos + std::strlen(o)),
                                   "grouping threshold", 0);
      break;
    }
  }
  if (op.empty())
    throw DataError("grouping '" + spec +
                    "' not understood; use 'group' or e.g. 'x2>=0.5'");
  if (col.size() < 2 || col[0] != 'x')
    throw DataError("grouping '" + spec + "': column must be a covariate like x2");
  const int j = static_cast<int>(std::strtol(col.c_str() + 1, nullptr, 10));
  if (j < 0 || j >= data.n_covariates)
    throw DataError("grouping column '" + col + "' not present in dataset");
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const double x = data.subjects[i].covariates[static_cast<std::size_t>(j)];
    bool hit = false;
    if (op == ">=") hit = x >= value;
    else if (op == ">") hit = x > value;
    else if (op == "<=") hit = x <= value;
    else hit = x < value;
    out[i] = hit ? 1 : 0;
  }
  return out;
}

inline int covariate_index(const SurvivalDataset& data, const std::string& name) {
  if (name.size() < 2 || name[0] != 'x')
    throw DataError("column '" + name + "' must be a covariate like x2");
  const int j = static_cast<int>(std::strtol(name.c_str() + 1, nullptr, 10));
  if (j < 0 || j >= data.n_covariates)
    throw DataError("column '" + name + "' not present in dataset");
  return j;
}

inline std::vector<double> predict_vector(const FittedModel& model,
                                          const SurvivalDataset& data, double t) {
  std::vector<double> out(data.subjects.size());
  for (std::size_t i = 0; i < data.subjects.size(); ++i)
    out[i] = predict_cif(model, data.subjects[i].covariates, t);
  return out;
}

// Model-level metric and decision comparisons (predictions recomputed at
// each horizon).
inline std::vector<GroupEvalReport> group_metric_diff(
    const FittedModel& model_c, const FittedModel& model_nc,
    const SurvivalDataset& data, const std::vector<Horizon>& horizons, int cause,
    const std::vector<int>& groups) {
  if (model_cause(model_c) != cause || model_cause(model_nc) != cause)
    throw DataError("group_metric_diff: models target a different cause");
  std::vector<GroupEvalReport> out;
  for (const Horizon& h : horizons)
    out.push_back(group_metric_diff(predict_vector(model_c, data, h.t),
                                    predict_vector(model_nc, data, h.t), data, h,
                                    cause, groups));
  return out;
}

inline DecisionReport decision_report(const FittedModel& model_c,
                                      const FittedModel& model_nc,
                                      const SurvivalDataset& data,
                                      const DecisionPolicy& policy,
                                      const std::vector<int>& groups, int cause) {
  if (model_cause(model_c) != cause || model_cause(model_nc) != cause)
    throw DataError("decision_report: models target a different cause");
  return decision_report(predict_vector(model_c, data, policy.horizon.t),
                         predict_vector(model_nc, data, policy.horizon.t), data,
                         policy, groups, cause);
}

// ---------------------------------------------------------------------------
// In-process replication study: simulate, split, fit Cox and Fine-Gray on
// the development portion, report discrepancies on the held-out portion.
// ---------------------------------------------------------------------------

struct ReplicationStudy {
  int replication = 0;
  std::vector<Horizon> horizons;
  std::vector<DiscrepancyReport> reports;  // one per horizon
  double censored_fraction = 0;
};

inline ReplicationStudy run_replication_study(const StudyConfig& cfg, int k) {
  ReplicationStudy out;
  out.replication = k;
  const Replication rep = generate_replication(cfg.sim, k);
  std::size_t censored = 0;
  for (const Subject& s : rep.data.subjects)
    if (s.event == kCensored) ++censored;
  out.censored_fraction =
      static_cast<double>(censored) / static_cast<double>(rep.data.size());

  out.horizons = compute_horizons(rep.data, cfg.horizons);
  const SplitIndices split =
      split_indices(rep.data.size(), cfg.split_fraction, cfg.sim.seed);
  const SurvivalDataset dev = subset_dataset(rep.data, split.dev);
  const SurvivalDataset test = subset_dataset(rep.data, split.test);

  const FittedCox cox = fit_cox(dev, cfg.cause);
  const FittedFineGray fg = fit_fine_gray(dev, cfg.cause);

  std::vector<const GroundTruthRow*> truth;
  std::vector<int> groups;
  truth.reserve(split.test.size());
  groups.reserve(split.test.size());
  for (std::size_t i : split.test) {
    truth.push_back(&rep.truth[i]);
    groups.push_back(rep.data.subjects[i].group);
  }

  for (const Horizon& h : out.horizons) {
    std::vector<double> f_nc(test.size()), f_c(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      f_nc[i] = predict_cox_cif(cox, test.subjects[i].covariates, h.t);
      f_c[i] = predict_fg_cif(fg, test.subjects[i].covariates, h.t);
    }
    out.reports.push_back(
        make_discrepancy_report(f_nc, f_c, truth, groups, h, cfg.cause));
  }
  return out;
}

// Runs fn(0..count-1) on up to `jobs` worker threads; the first exception is
// rethrown after all workers join.
template <typename Fn>
void run_parallel(int count, int jobs, Fn&& fn) {
  if (jobs < 1) jobs = 1;
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(jobs, count);
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::vector<ReplicationStudy> run_study(const StudyConfig& cfg, int jobs) {
  std::vector<ReplicationStudy> out(static_cast<std::size_t>(cfg.sim.replications));
  run_parallel(cfg.sim.replications, jobs, [&](int k) {
    out[static_cast<std::size_t>(k)] = run_replication_study(cfg, k);
  });
  return out;
}

// Groups per-replication reports by horizon label, preserving the horizon
// order of the first replication.
inline std::vector<StudySummary> summarize_study(
    const std::vector<ReplicationStudy>& studies, std::uint64_t seed) {
  if (studies.empty()) throw DataError("summarize_study: no replications");
  std::vector<StudySummary> out;
  for (std::size_t h = 0; h < studies.front().reports.size(); ++h) {
    std::vector<DiscrepancyReport> slice;
    for (const ReplicationStudy& s : studies) {
      if (s.reports.size() != studies.front().reports.size())
        throw DataError("summarize_study: replications disagree on horizons");
      slice.push_back(s.reports[h]);
    }
    out.push_back(study_summary(slice, seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run manifest: reproducibility record for simulate. Written before the
// first replication starts and rewritten as replications finish. Holds
// wall-clock timings, so it is the one output that is not byte-stable.
// ---------------------------------------------------------------------------

inline json sim_config_to_json(const SimConfig& cfg) {
  return json{{"n", cfg.n},
              {"p", cfg.p},
              {"sigma_k", cfg.sigma_k},
              {"sigma_phi", cfg.sigma_phi},
              {"sigma_z", cfg.sigma_z},
              {"group_center", cfg.group_center},
              {"group_prob", cfg.group_prob},
              {"seed", cfg.seed},
              {"replications", cfg.replications}};
}

class RunManifest {
 public:
  RunManifest(const std::string& path, const SimConfig& cfg) : path_(path) {
    doc_["tool_version"] = kToolVersion;
    doc_["seed"] = cfg.seed;
    doc_["config"] = sim_config_to_json(cfg);
    doc_["horizon_convention"] =
        "quantile horizons are computed per replication over its uncensored "
        "observed event times";
    doc_["replications"] = json::array();
    flush();
  }

  void add_replication(int k, const std::string& data_path,
                       const std::string& truth_path, double censored_fraction,
                       double elapsed_seconds) {
    std::lock_guard<std::mutex> lock(mutex_);
    doc_["replications"].push_back(json{{"replication", k},
                                        {"data", data_path},
                                        {"truth", truth_path},
                                        {"censored_fraction", censored_fraction},
                                        {"elapsed_seconds", elapsed_seconds}});
    flush();
  }

 private:
  void flush() { write_json_file(doc_, path_); }

  std::string path_;
  json doc_;
  std::mutex mutex_;
};

}  // namespace crisk
