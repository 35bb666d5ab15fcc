#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crisk/gompertz.hpp"
#include "crisk/rng.hpp"
#include "crisk/types.hpp"

namespace crisk {

/**
 * Synthetic-population configuration. Two competing causes with Gompertz
 * cause-specific hazards sharing a per-subject shape, independent
 * constant-hazard censoring, and group-shifted covariates.
 */
struct SimConfig {
  int n = 30000;
  int p = 10;
  double sigma_k = 1.0;    // sd of the kappa coefficient entries
  double sigma_phi = 1.0;  // sd of the phi entries
  double sigma_z = 1.0;    // sd of the zeta entries
  std::array<double, 2> group_center = {1.5, 1.5};  // c1; group 0 uses -c1
  double group_prob = 0.5;
  std::uint64_t seed = 1;
  int replications = 25;

  void validate() const {
    if (n < 1) throw DataError("sim: n must be >= 1");
    if (p < 10) throw DataError("sim: p must be >= 10 (transforms read indices 1..9)");
    if (sigma_k < 0 || sigma_phi < 0 || sigma_z < 0)
      throw DataError("sim: sigma parameters must be >= 0");
    if (!(group_prob >= 0 && group_prob <= 1))
      throw DataError("sim: group_prob must lie in [0, 1]");
    if (replications < 1) throw DataError("sim: replications must be >= 1");
  }
};

// Per-group coefficient draws; zeta is shared across groups.
struct GroupCoefficients {
  std::vector<double> kappa1;  // length p
  std::vector<double> kappa2;  // length p
  std::vector<double> phi;     // length 5, acts on covariates 5..9
  std::vector<double> zeta;    // length 5, acts on covariates 5..9
};

struct HazardParams {
  double w1 = 0;  // cause-1 Gompertz scale
  double w2 = 0;  // cause-2 Gompertz scale
  double ws = 0;  // shared Gompertz shape
  double wc = 0;  // censoring rate
};

struct GroundTruthRow {
  double w1 = 0, w2 = 0, ws = 0, wc = 0;
  double latent_time = 0;  // T'
  int latent_cause = 0;    // D' in {1, 2}
  double censor_time = 0;  // C, +inf when never censored
};

using GroundTruth = std::vector<GroundTruthRow>;

struct Replication {
  SurvivalDataset data;
  GroundTruth truth;
};

// Coefficient draws: per group kappa1, kappa2, phi; zeta drawn once and
// shared. Draw order is fixed so replications are reproducible.
inline std::array<GroupCoefficients, 2> make_coefficients(const SimConfig& cfg,
                                                          RandomStream& rng) {
  std::array<GroupCoefficients, 2> out;
  for (auto& gc : out) {
    gc.kappa1.resize(static_cast<std::size_t>(cfg.p));
    gc.kappa2.resize(static_cast<std::size_t>(cfg.p));
    gc.phi.resize(5);
    for (auto& v : gc.kappa1) v = rng.normal(0, cfg.sigma_k);
    for (auto& v : gc.kappa2) v = rng.normal(0, cfg.sigma_k);
    for (auto& v : gc.phi) v = rng.normal(0, cfg.sigma_phi);
  }
  std::vector<double> zeta(5);
  for (auto& v : zeta) v = rng.normal(0, cfg.sigma_z);
  out[0].zeta = zeta;
  out[1].zeta = zeta;
  return out;
}

struct Population {
  std::vector<int> groups;
  std::vector<std::vector<double>> covariates;
};

inline std::vector<double> draw_covariates(const SimConfig& cfg, int group,
                                           RandomStream& rng) {
  std::vector<double> x(static_cast<std::size_t>(cfg.p));
  const double sign = group == 1 ? 1.0 : -1.0;
  x[0] = rng.normal(sign * cfg.group_center[0], 1.0);
  x[1] = rng.normal(sign * cfg.group_center[1], 1.0);
  for (int j = 2; j < cfg.p; ++j) x[static_cast<std::size_t>(j)] = rng.normal();
  return x;
}

inline Population gen_covariates(const SimConfig& cfg, RandomStream& rng) {
  Population pop;
  pop.groups.resize(static_cast<std::size_t>(cfg.n));
  pop.covariates.resize(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const int g = rng.bernoulli(cfg.group_prob) ? 1 : 0;
    pop.groups[static_cast<std::size_t>(i)] = g;
    pop.covariates[static_cast<std::size_t>(i)] = draw_covariates(cfg, g, rng);
  }
  return pop;
}

// Covariate transforms (0-based, half-open slices): x[1:5] = indices 1..4,
// x[5:10] = indices 5..9.
//   w1 = |(k1[5:10].x[5:10])^2 + k1[1:5].x[1:5]|
//   w2 = |(k2[1:5].x[1:5])^2 + k2[5:10].x[5:10]|
//   ws = |phi.x[5:10]|
//   wc = (zeta.x[5:10])^2
inline HazardParams transforms(const std::vector<double>& x,
                               const GroupCoefficients& coeffs) {
  auto dot = [&x](const std::vector<double>& c, int c_lo, int x_lo, int len) {
    double s = 0;
    for (int i = 0; i < len; ++i)
      s += c[static_cast<std::size_t>(c_lo + i)] * x[static_cast<std::size_t>(x_lo + i)];
    return s;
  };
  const double k1_low = dot(coeffs.kappa1, 1, 1, 4);
  const double k1_high = dot(coeffs.kappa1, 5, 5, 5);
  const double k2_low = dot(coeffs.kappa2, 1, 1, 4);
  const double k2_high = dot(coeffs.kappa2, 5, 5, 5);
  const double phi_dot = dot(coeffs.phi, 0, 5, 5);
  const double zeta_dot = dot(coeffs.zeta, 0, 5, 5);
  HazardParams w;
  w.w1 = std::abs(k1_high * k1_high + k1_low);
  w.w2 = std::abs(k2_low * k2_low + k2_high);
  w.ws = std::abs(phi_dot);
  w.wc = zeta_dot * zeta_dot;
  return w;
}

struct LatentEvent {
  double time = 0;  // T'
  int cause = 0;    // D'
};

// First-event time from the all-cause hazard, then the cause from a
// Bernoulli on the relative hazard. The relative hazard is time-constant
// because both causes share the shape ws.
inline LatentEvent gen_events(const HazardParams& w, RandomStream& rng) {
  const double total = w.w1 + w.w2;
  if (!(total > 0)) throw NumericError("degenerate subject: w1 + w2 = 0");
  LatentEvent ev;
  ev.time = sample_gompertz(GompertzParams(total, w.ws), rng.uniform01());
  ev.cause = rng.bernoulli(w.w1 / total) ? 1 : 2;
  return ev;
}

// Censoring under constant hazard wc; wc = 0 means never censored.
inline double gen_censoring(const HazardParams& w, RandomStream& rng) {
  const double u = rng.uniform01();
  if (w.wc == 0) return std::numeric_limits<double>::infinity();
  return -std::log(u) / w.wc;
}

/**
 * One full replication: coefficients, covariates, latent events, censoring,
 * and the observed (T, D). Deterministic given (cfg.seed, replication_index).
 * Subjects whose transform collapses to zero total hazard are re-drawn up to
 * 100 times before the replication fails.
 */
inline Replication generate_replication(const SimConfig& cfg,
                                        int replication_index) {
  cfg.validate();
  RandomStream rng(cfg.seed, static_cast<std::uint64_t>(replication_index));
  const auto coeffs = make_coefficients(cfg, rng);

  Replication rep;
  rep.data.n_risks = 2;
  rep.data.n_covariates = cfg.p;
  rep.data.subjects.resize(static_cast<std::size_t>(cfg.n));
  rep.truth.resize(static_cast<std::size_t>(cfg.n));

  for (int i = 0; i < cfg.n; ++i) {
    const int g = rng.bernoulli(cfg.group_prob) ? 1 : 0;
    std::vector<double> x;
    HazardParams w;
    int attempts = 0;
    for (;;) {
      x = draw_covariates(cfg, g, rng);
      w = transforms(x, coeffs[static_cast<std::size_t>(g)]);
      if (w.w1 + w.w2 > 0) break;
      if (++attempts >= 100)
        throw NumericError("degenerate subject: zero total hazard after 100 resamples");
    }
    const LatentEvent ev = gen_events(w, rng);
    const double c = gen_censoring(w, rng);

    Subject& s = rep.data.subjects[static_cast<std::size_t>(i)];
    s.id = std::to_string(i);
    s.covariates = std::move(x);
    s.group = g;
    s.time = std::min(ev.time, c);
    s.event = ev.time <= c ? ev.cause : kCensored;

    GroundTruthRow& row = rep.truth[static_cast<std::size_t>(i)];
    row.w1 = w.w1;
    row.w2 = w.w2;
    row.ws = w.ws;
    row.wc = w.wc;
    row.latent_time = ev.time;
    row.latent_cause = ev.cause;
    row.censor_time = c;
  }
  rep.data.validate();
  return rep;
}

// Closed-form true CIF: F_r(t) = (w_r / (w1+w2)) * (1 - exp(-H_all(t))),
// valid because the causes share the Gompertz shape.
inline double true_cif(const GroundTruthRow& row, int cause, double t) {
  const double wr = cause == 1 ? row.w1 : row.w2;
  const double total = row.w1 + row.w2;
  if (t <= 0 || total <= 0 || wr <= 0) return 0;
  const double h_all = gompertz_cumhaz(GompertzParams(total, row.ws), t);
  return wr / total * (-std::expm1(-h_all));
}

// Marginal latent-time CDF under the cause-specific hazard alone.
inline double true_marginal(const GroundTruthRow& row, int cause, double t) {
  const double wr = cause == 1 ? row.w1 : row.w2;
  return gompertz_cdf(GompertzParams(wr, row.ws), t);
}

}  // namespace crisk
