#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "crisk/estimators.hpp"
#include "crisk/types.hpp"

namespace crisk {

/**
 * IPCW time-dependent Brier score at horizon t for cause r:
 *   (1/n) sum_i w_i(t) (1[T_i <= t, D_i = r] - Fhat_i)^2
 *   w_i(t) = 1[T_i <= t, D_i != 0] / Ghat(T_i-) + 1[T_i > t] / Ghat(t)
 * Subjects censored before t carry weight 0. Reduces to the plain Brier
 * score when Ghat = 1 (zero censoring).
 */
inline double td_brier(const std::vector<double>& predictions,
                       const SurvivalDataset& data, const Horizon& horizon,
                       int cause, const StepFunction& ghat) {
  if (predictions.size() != data.subjects.size())
    throw DataError("td_brier: predictions misaligned with subjects");
  const double t = horizon.t;
  double sum = 0;
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const Subject& s = data.subjects[i];
    double w = 0, y = 0;
    if (s.time <= t && s.event != kCensored) {
      const double g = step_eval_left(ghat, s.time);
      if (g <= 0)
        throw NumericError("censoring support exhausted before horizon");
      w = 1.0 / g;
      y = s.event == cause ? 1.0 : 0.0;
    } else if (s.time > t) {
      const double g = step_eval(ghat, t);
      if (g <= 0)
        throw NumericError("censoring support exhausted before horizon");
      w = 1.0 / g;
      y = 0.0;
    }
    const double delta = y - predictions[i];
    sum += w * delta * delta;
  }
  return sum / static_cast<double>(data.subjects.size());
}

inline double td_brier(const std::vector<double>& predictions,
                       const SurvivalDataset& data, const Horizon& horizon,
                       int cause) {
  return td_brier(predictions, data, horizon, cause, censoring_survival(data));
}

/**
 * IPCW cause-specific concordance at horizon t. Comparable pairs (i, j):
 *   i has a cause-r event with T_i <= t, and either T_i < T_j, or
 *   T_j <= T_i with D_j a competing event (not 0, not r).
 * Concordant when the cause-r risk of i exceeds that of j; prediction ties
 * count 1/2. Pair weights 1/Ghat(T_i-)^2 and 1/(Ghat(T_i-) Ghat(T_j-)).
 */
inline double td_c_index(const std::vector<double>& predictions,
                         const SurvivalDataset& data, const Horizon& horizon,
                         int cause, const StepFunction& ghat) {
  if (predictions.size() != data.subjects.size())
    throw DataError("td_c_index: predictions misaligned with subjects");
  const double t = horizon.t;
  const std::size_t n = data.subjects.size();
  double pair_weight = 0, concordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Subject& si = data.subjects[i];
    if (si.event != cause || si.time > t) continue;
    const double gi = step_eval_left(ghat, si.time);
    if (gi <= 0)
      throw NumericError("censoring support exhausted before horizon");
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Subject& sj = data.subjects[j];
      double w = 0;
      if (si.time < sj.time) {
        w = 1.0 / (gi * gi);
      } else if (sj.time <= si.time && sj.event != kCensored && sj.event != cause) {
        const double gj = step_eval_left(ghat, sj.time);
        if (gj <= 0)
          throw NumericError("censoring support exhausted before horizon");
        w = 1.0 / (gi * gj);
      } else {
        continue;
      }
      pair_weight += w;
      if (predictions[i] > predictions[j])
        concordant += w;
      else if (predictions[i] == predictions[j])
        concordant += 0.5 * w;
    }
  }
  if (pair_weight <= 0) throw NumericError("no comparable pairs");
  return concordant / pair_weight;
}

inline double td_c_index(const std::vector<double>& predictions,
                         const SurvivalDataset& data, const Horizon& horizon,
                         int cause) {
  return td_c_index(predictions, data, horizon, cause, censoring_survival(data));
}

struct EvalReport {
  Horizon horizon;
  int cause = 1;
  double td_brier = 0;
  double td_ci = 0;
};

inline EvalReport evaluate_predictions(const std::vector<double>& predictions,
                                       const SurvivalDataset& data,
                                       const Horizon& horizon, int cause) {
  const StepFunction ghat = censoring_survival(data);
  EvalReport rep;
  rep.horizon = horizon;
  rep.cause = cause;
  rep.td_brier = td_brier(predictions, data, horizon, cause, ghat);
  rep.td_ci = td_c_index(predictions, data, horizon, cause, ghat);
  return rep;
}

/**
 * Group-stratified comparison of a competing-risk model against its naive
 * alternative: per-group metrics under both models, their differences
 * (competing minus non-competing), and the fairness-gap change
 * |Delta^C| - |Delta^NC| where Delta is the between-group metric difference
 * (group 1 minus group 0) under each model. Metrics are computed within
 * each group with that group's own censoring estimate.
 */
struct GroupEvalReport {
  Horizon horizon;
  int cause = 1;
  std::array<double, 2> brier_c{}, brier_nc{}, ci_c{}, ci_nc{};
  std::array<double, 2> brier_diff{}, ci_diff{};
  double brier_gap_change = 0;
  double ci_gap_change = 0;
};

inline GroupEvalReport group_metric_diff(const std::vector<double>& pred_c,
                                         const std::vector<double>& pred_nc,
                                         const SurvivalDataset& data,
                                         const Horizon& horizon, int cause,
                                         const std::vector<int>& groups) {
  if (pred_c.size() != data.subjects.size() || pred_nc.size() != data.subjects.size() ||
      groups.size() != data.subjects.size())
    throw DataError("group_metric_diff: misaligned inputs");
  // Restrict data and predictions to each group once.
  std::array<SurvivalDataset, 2> part;
  std::array<std::vector<double>, 2> part_c, part_nc;
  for (int g = 0; g < 2; ++g) {
    part[static_cast<std::size_t>(g)].n_risks = data.n_risks;
    part[static_cast<std::size_t>(g)].n_covariates = data.n_covariates;
  }
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const int g = groups[i];
    if (g != 0 && g != 1) throw DataError("group_metric_diff: labels must be 0/1");
    part[static_cast<std::size_t>(g)].subjects.push_back(data.subjects[i]);
    part_c[static_cast<std::size_t>(g)].push_back(pred_c[i]);
    part_nc[static_cast<std::size_t>(g)].push_back(pred_nc[i]);
  }
  if (part[0].subjects.empty() || part[1].subjects.empty())
    throw DataError("empty group");

  GroupEvalReport rep;
  rep.horizon = horizon;
  rep.cause = cause;
  for (std::size_t g = 0; g < 2; ++g) {
    const StepFunction ghat = censoring_survival(part[g]);
    rep.brier_c[g] = td_brier(part_c[g], part[g], horizon, cause, ghat);
    rep.brier_nc[g] = td_brier(part_nc[g], part[g], horizon, cause, ghat);
    rep.ci_c[g] = td_c_index(part_c[g], part[g], horizon, cause, ghat);
    rep.ci_nc[g] = td_c_index(part_nc[g], part[g], horizon, cause, ghat);
    rep.brier_diff[g] = rep.brier_c[g] - rep.brier_nc[g];
    rep.ci_diff[g] = rep.ci_c[g] - rep.ci_nc[g];
  }
  rep.brier_gap_change = std::abs(rep.brier_c[1] - rep.brier_c[0]) -
                         std::abs(rep.brier_nc[1] - rep.brier_nc[0]);
  rep.ci_gap_change = std::abs(rep.ci_c[1] - rep.ci_c[0]) -
                      std::abs(rep.ci_nc[1] - rep.ci_nc[0]);
  return rep;
}

}  // namespace crisk
