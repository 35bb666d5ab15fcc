#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crisk/estimators.hpp"
#include "crisk/gompertz.hpp"
#include "crisk/quadrature.hpp"
#include "crisk/rng.hpp"
#include "crisk/sim.hpp"
#include "crisk/types.hpp"

namespace crisk {

// Relative cumulative incidence discrepancy:
//   L = (F_nc - F_c) / max(F_nc, F_c), in [-1, 1].
// Both estimates zero (no event mass at the horizon) yields L = 0.
inline double relative_discrepancy(double f_nc, double f_c) {
  if (!(f_nc >= 0 && f_nc <= 1) || !(f_c >= 0 && f_c <= 1))
    throw DataError("relative_discrepancy: inputs must lie in [0, 1]");
  const double m = std::max(f_nc, f_c);
  if (m <= 0) return 0;
  return (f_nc - f_c) / m;
}

struct PerSubjectDiscrepancy {
  std::vector<double> values;
  double mean = 0;
};

// Applies relative_discrepancy to aligned per-subject predictions from the
// naive and competing-risk models.
inline PerSubjectDiscrepancy empirical_discrepancy(
    const std::vector<double>& f_nc, const std::vector<double>& f_c) {
  if (f_nc.size() != f_c.size())
    throw DataError("empirical_discrepancy: prediction vectors differ in length");
  if (f_nc.empty()) throw DataError("empirical_discrepancy: no subjects");
  PerSubjectDiscrepancy out;
  out.values.resize(f_nc.size());
  double sum = 0;
  for (std::size_t i = 0; i < f_nc.size(); ++i) {
    out.values[i] = relative_discrepancy(f_nc[i], f_c[i]);
    sum += out.values[i];
  }
  out.mean = sum / static_cast<double>(f_nc.size());
  return out;
}

// Model-level form: naive Cox against Fine-Gray, per subject at one horizon.
inline PerSubjectDiscrepancy empirical_discrepancy(const FittedCox& model_nc,
                                                   const FittedFineGray& model_c,
                                                   const SurvivalDataset& data,
                                                   const Horizon& horizon,
                                                   int cause) {
  if (model_nc.cause != cause || model_c.cause != cause)
    throw DataError("empirical_discrepancy: models target a different cause");
  std::vector<double> f_nc(data.subjects.size()), f_c(data.subjects.size());
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    f_nc[i] = predict_cox_cif(model_nc, data.subjects[i].covariates, horizon.t);
    f_c[i] = predict_fg_cif(model_c, data.subjects[i].covariates, horizon.t);
  }
  return empirical_discrepancy(f_nc, f_c);
}

/**
 * Theoretical discrepancy for one subject's ground-truth hazards:
 *   P(T2 < T1 | T1 < t) = int_0^t F2(s) f1(s) ds / F1(t)
 * by Gauss-Legendre quadrature with node doubling to 1e-8. The denominator
 * is P(T1 < t); the integration interval is shortened to where f1 carries
 * mass (cumulative hazard <= 45, tail below 1e-19) so that spiked
 * integrands from large hazards cannot be stepped over.
 */
inline double theoretical_discrepancy(const GroundTruthRow& row, double t) {
  if (!(t > 0)) return 0;
  const GompertzParams g1(row.w1, row.ws), g2(row.w2, row.ws);
  const double denom = gompertz_cdf(g1, t);
  if (denom <= 0 || row.w2 <= 0) return 0;
  const double t_eff = std::min(t, gompertz_inv_cumhaz(g1, 45.0));
  const auto integrand = [&](double s) {
    return gompertz_cdf(g2, s) * gompertz_pdf(g1, s);
  };
  const QuadratureResult q = integrate_to_tol(integrand, 0.0, t_eff, 1e-8);
  double l = q.value / denom;
  if (l < 0) l = 0;
  if (l > 1) l = 1;
  return l;
}

struct DiscrepancyIdentityCheck {
  double lhs = 0;  // relative_discrepancy of the closed-form true quantities
  double rhs = 0;  // Monte-Carlo P(D' != 1 | T1 < t)
  double gap = 0;
};

// Checks the identity L^1(t, x) = P(D' != 1 | T_1 < t, x) by drawing latent
// cause-specific times and comparing frequencies with the closed form.
inline DiscrepancyIdentityCheck discrepancy_identity_check(const GroundTruthRow& row, double t,
                                    int mc_samples, RandomStream& rng) {
  if (mc_samples < 1) throw DataError("discrepancy_identity_check: mc_samples must be >= 1");
  DiscrepancyIdentityCheck out;
  out.lhs = relative_discrepancy(true_marginal(row, 1, t), true_cif(row, 1, t));
  const GompertzParams g1(row.w1, row.ws), g2(row.w2, row.ws);
  auto draw = [&rng](const GompertzParams& g) {
    if (g.scale == 0) return std::numeric_limits<double>::infinity();
    return sample_gompertz(g, rng.uniform01());
  };
  long long cond = 0, joint = 0;
  for (int s = 0; s < mc_samples; ++s) {
    const double t1 = draw(g1);
    const double t2 = draw(g2);
    if (t1 < t) {
      ++cond;
      if (t2 < t1) ++joint;
    }
  }
  out.rhs = cond > 0 ? static_cast<double>(joint) / static_cast<double>(cond) : 0;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

struct GroupDiscrepancy {
  std::array<double, 2> mean{};  // L_g per group label
  std::array<double, 2> gap{};   // Delta_g = L_g - L_{not g}
};

inline GroupDiscrepancy group_discrepancy(const std::vector<double>& values,
                                          const std::vector<int>& groups) {
  if (values.size() != groups.size())
    throw DataError("group_discrepancy: values and groups differ in length");
  std::array<double, 2> sum{}, count{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int g = groups[i];
    if (g != 0 && g != 1) throw DataError("group_discrepancy: labels must be 0/1");
    sum[static_cast<std::size_t>(g)] += values[i];
    count[static_cast<std::size_t>(g)] += 1;
  }
  if (count[0] == 0 || count[1] == 0) throw DataError("empty group");
  GroupDiscrepancy out;
  out.mean[0] = sum[0] / count[0];
  out.mean[1] = sum[1] / count[1];
  out.gap[0] = out.mean[0] - out.mean[1];
  out.gap[1] = out.mean[1] - out.mean[0];
  return out;
}

/**
 * Per-replication, per-horizon discrepancy record: empirical L from a model
 * pair and theoretical L from the ground truth, with group means and the
 * group-1 gap.
 */
struct DiscrepancyReport {
  Horizon horizon;
  int cause = 1;
  std::vector<double> empirical_L, theoretical_L;
  double empirical_mean = 0, theoretical_mean = 0;
  std::array<double, 2> group_empirical{}, group_theoretical{};
  double gap_empirical = 0, gap_theoretical = 0;  // group 1 minus group 0
};

inline DiscrepancyReport make_discrepancy_report(
    const std::vector<double>& f_nc, const std::vector<double>& f_c,
    const std::vector<const GroundTruthRow*>& truth,
    const std::vector<int>& groups, const Horizon& horizon, int cause) {
  if (truth.size() != f_nc.size() || groups.size() != f_nc.size())
    throw DataError("make_discrepancy_report: misaligned inputs");
  DiscrepancyReport rep;
  rep.horizon = horizon;
  rep.cause = cause;
  const PerSubjectDiscrepancy emp = empirical_discrepancy(f_nc, f_c);
  rep.empirical_L = emp.values;
  rep.empirical_mean = emp.mean;
  rep.theoretical_L.resize(truth.size());
  double sum = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    rep.theoretical_L[i] = theoretical_discrepancy(*truth[i], horizon.t);
    sum += rep.theoretical_L[i];
  }
  rep.theoretical_mean = sum / static_cast<double>(truth.size());
  const GroupDiscrepancy ge = group_discrepancy(rep.empirical_L, groups);
  const GroupDiscrepancy gt = group_discrepancy(rep.theoretical_L, groups);
  rep.group_empirical = ge.mean;
  rep.group_theoretical = gt.mean;
  rep.gap_empirical = ge.gap[1];
  rep.gap_theoretical = gt.gap[1];
  return rep;
}

// Ordinary least-squares slope of y on x over (x, y) pairs.
inline double ols_slope(const std::vector<std::array<double, 2>>& pairs) {
  if (pairs.size() < 2) throw DataError("ols_slope: need at least 2 points");
  double mx = 0, my = 0;
  for (const auto& p : pairs) {
    mx += p[0];
    my += p[1];
  }
  mx /= static_cast<double>(pairs.size());
  my /= static_cast<double>(pairs.size());
  double sxx = 0, sxy = 0;
  for (const auto& p : pairs) {
    sxx += (p[0] - mx) * (p[0] - mx);
    sxy += (p[0] - mx) * (p[1] - my);
  }
  if (sxx <= 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

/**
 * Cross-replication summary at a fixed horizon: RMSE between empirical and
 * theoretical means (and gap), bootstrap SDs over 1000 seeded resamples of
 * the replication set, OLS slopes of empirical on theoretical, and the raw
 * per-replication pairs for external plotting.
 */
struct StudySummary {
  std::string horizon_label;
  double rmse_L = 0, rmse_L_sd = 0;
  double rmse_gap = 0, rmse_gap_sd = 0;
  double slope_L = 0, slope_gap = 0;
  std::vector<std::array<double, 2>> pairs_L;    // (theoretical, empirical)
  std::vector<std::array<double, 2>> pairs_gap;
};

namespace detail {

inline double rmse_of(const std::vector<double>& errors) {
  double s = 0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

inline double bootstrap_rmse_sd(const std::vector<double>& errors, int b_count,
                                RandomStream& rng) {
  const std::size_t r = errors.size();
  std::vector<double> stats(static_cast<std::size_t>(b_count));
  std::vector<double> sample(r);
  for (int b = 0; b < b_count; ++b) {
    for (std::size_t i = 0; i < r; ++i)
      sample[i] = errors[rng.below(r)];
    stats[static_cast<std::size_t>(b)] = rmse_of(sample);
  }
  double mean = 0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(b_count);
  double var = 0;
  for (double s : stats) var += (s - mean) * (s - mean);
  return std::sqrt(var / static_cast<double>(b_count - 1));
}

}  // namespace detail

inline StudySummary study_summary(const std::vector<DiscrepancyReport>& reps,
                                  std::uint64_t seed) {
  if (reps.size() < 2) throw DataError("study_summary: need at least 2 replications");
  constexpr int kBootstrap = 1000;
  StudySummary out;
  out.horizon_label = reps.front().horizon.label;
  std::vector<double> err_l, err_gap;
  for (const DiscrepancyReport& r : reps) {
    out.pairs_L.push_back({r.theoretical_mean, r.empirical_mean});
    out.pairs_gap.push_back({r.gap_theoretical, r.gap_empirical});
    err_l.push_back(r.empirical_mean - r.theoretical_mean);
    err_gap.push_back(r.gap_empirical - r.gap_theoretical);
  }
  out.rmse_L = detail::rmse_of(err_l);
  out.rmse_gap = detail::rmse_of(err_gap);
  RandomStream rng(seed, 0x626F6F74ULL);  // dedicated bootstrap stream
  out.rmse_L_sd = detail::bootstrap_rmse_sd(err_l, kBootstrap, rng);
  out.rmse_gap_sd = detail::bootstrap_rmse_sd(err_gap, kBootstrap, rng);
  out.slope_L = ols_slope(out.pairs_L);
  out.slope_gap = ols_slope(out.pairs_gap);
  return out;
}

}  // namespace crisk
