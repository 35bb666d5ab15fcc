#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "crisk/sim.hpp"

// Observed censoring fraction at the default config (seed 1, replication 0);
// regression-pins the generator.
#define CRISK_CENSORING_FIXTURE 0.30003333333333332

using namespace crisk;

TEST_CASE("coefficient draws have the configured variance") {
  SimConfig cfg;
  RandomStream rng(31);
  std::vector<double> entries;
  while (entries.size() < 10000) {
    const auto coeffs = make_coefficients(cfg, rng);
    for (int g = 0; g < 2; ++g) {
      REQUIRE(coeffs[static_cast<std::size_t>(g)].kappa1.size() == 10);
      for (double v : coeffs[static_cast<std::size_t>(g)].kappa1)
        entries.push_back(v);
    }
  }
  double mean = 0;
  for (double v : entries) mean += v;
  mean /= static_cast<double>(entries.size());
  double var = 0;
  for (double v : entries) var += (v - mean) * (v - mean);
  var /= static_cast<double>(entries.size());
  CHECK_THAT(var, Catch::Matchers::WithinAbs(1.0, 0.05));
}

TEST_CASE("groups draw independent kappa vectors") {
  SimConfig cfg;
  RandomStream rng(32);
  const auto coeffs = make_coefficients(cfg, rng);
  CHECK(coeffs[0].kappa1.size() == 10);
  CHECK(coeffs[1].kappa1.size() == 10);
  CHECK(coeffs[0].kappa1 != coeffs[1].kappa1);
  CHECK(coeffs[0].zeta == coeffs[1].zeta);  // shared across groups
}

TEST_CASE("covariate generation matches the configured centers") {
  SimConfig cfg;  // n = 30000
  RandomStream rng(33);
  const Population pop = gen_covariates(cfg, rng);
  double frac1 = 0, mean_x0_g1 = 0, mean_x5 = 0;
  std::size_t n1 = 0;
  for (int i = 0; i < cfg.n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    frac1 += pop.groups[ui];
    mean_x5 += pop.covariates[ui][5];
    if (pop.groups[ui] == 1) {
      mean_x0_g1 += pop.covariates[ui][0];
      ++n1;
    }
  }
  frac1 /= cfg.n;
  mean_x5 /= cfg.n;
  mean_x0_g1 /= static_cast<double>(n1);
  CHECK_THAT(frac1, Catch::Matchers::WithinAbs(0.5, 0.02));
  CHECK_THAT(mean_x0_g1, Catch::Matchers::WithinAbs(1.5, 0.05));
  CHECK_THAT(mean_x5, Catch::Matchers::WithinAbs(0.0, 0.05));
}

TEST_CASE("transforms evaluate the slice formulas") {
  GroupCoefficients coeffs;
  coeffs.kappa1.assign(10, 0.0);
  coeffs.kappa2.assign(10, 0.0);
  coeffs.phi.assign(5, 0.0);
  coeffs.zeta.assign(5, 0.0);
  std::vector<double> x(10, 0.0);

  SECTION("zero covariates vanish") {
    const HazardParams w = transforms(x, coeffs);
    CHECK(w.w1 == 0);
    CHECK(w.w2 == 0);
    CHECK(w.ws == 0);
    CHECK(w.wc == 0);
  }
  SECTION("unit kappa1 at index 5 squares the covariate") {
    coeffs.kappa1[5] = 1;
    x[5] = 2;
    CHECK(transforms(x, coeffs).w1 == 4.0);
  }
  SECTION("censoring rate is the squared dot product") {
    coeffs.zeta[0] = 1;  // acts on covariate index 5
    x[5] = -3;
    CHECK(transforms(x, coeffs).wc == 9.0);
  }
  SECTION("kappa slices do not touch covariate 0") {
    coeffs.kappa1.assign(10, 1.0);
    coeffs.kappa2.assign(10, 1.0);
    x.assign(10, 0.0);
    x[0] = 100;
    const HazardParams w = transforms(x, coeffs);
    CHECK(w.w1 == 0);
    CHECK(w.w2 == 0);
  }
}

TEST_CASE("event generation follows the relative hazard") {
  RandomStream rng(34);
  SECTION("symmetric hazards split causes evenly") {
    HazardParams w{1, 1, 0, 0};
    int cause1 = 0;
    const int n = 100000;
    double sum_t = 0;
    for (int i = 0; i < n; ++i) {
      const LatentEvent ev = gen_events(w, rng);
      if (ev.cause == 1) ++cause1;
      sum_t += ev.time;
    }
    CHECK_THAT(static_cast<double>(cause1) / n, Catch::Matchers::WithinAbs(0.5, 0.01));
    // all-cause hazard 2 => exponential with mean 0.5
    CHECK_THAT(sum_t / n, Catch::Matchers::WithinAbs(0.5, 0.01));
  }
  SECTION("single risk always yields cause 1") {
    HazardParams w{2, 0, 0.3, 0};
    for (int i = 0; i < 100; ++i) CHECK(gen_events(w, rng).cause == 1);
  }
  SECTION("zero total hazard is degenerate") {
    HazardParams w{0, 0, 0, 0};
    CHECK_THROWS_WITH(gen_events(w, rng),
                      Catch::Matchers::ContainsSubstring("degenerate subject"));
  }
}

TEST_CASE("censoring draws") {
  RandomStream rng(35);
  SECTION("zero rate never censors") {
    HazardParams w{1, 1, 0, 0};
    CHECK(std::isinf(gen_censoring(w, rng)));
  }
  SECTION("draw matches the inverted uniform") {
    HazardParams w{1, 1, 0, 1.0};
    RandomStream peek = rng;  // same stream state
    const double u = peek.uniform01();
    CHECK_THAT(gen_censoring(w, rng), Catch::Matchers::WithinAbs(-std::log(u), 1e-12));
  }
  SECTION("mean matches 1/rate") {
    HazardParams w{1, 1, 0, 2.0};
    const int n = 100000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += gen_censoring(w, rng);
    CHECK_THAT(sum / n, Catch::Matchers::WithinAbs(0.5, 0.01));
  }
}

TEST_CASE("replication generation at defaults") {
  SimConfig cfg;  // defaults: n = 30000, p = 10, seed = 1
  const Replication rep = generate_replication(cfg, 0);
  CHECK(rep.data.size() == 30000);
  CHECK(rep.data.n_risks == 2);
  CHECK(rep.data.n_covariates == 10);
  CHECK(rep.truth.size() == 30000);

  std::size_t censored = 0;
  for (const Subject& s : rep.data.subjects)
    if (s.event == kCensored) ++censored;
  const double frac = static_cast<double>(censored) / 30000.0;
  CHECK(frac > 0);
  CHECK(frac < 1);
  // regression fixture for (seed = 1, replication 0)
  CHECK_THAT(frac, Catch::Matchers::WithinAbs(CRISK_CENSORING_FIXTURE, 1e-12));
}

TEST_CASE("replications are bit-identical for the same seed and index") {
  SimConfig cfg;
  cfg.n = 500;
  cfg.seed = 99;
  const Replication a = generate_replication(cfg, 3);
  const Replication b = generate_replication(cfg, 3);
  REQUIRE(a.data.size() == b.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    CHECK(a.data.subjects[i].time == b.data.subjects[i].time);
    CHECK(a.data.subjects[i].event == b.data.subjects[i].event);
    CHECK(a.data.subjects[i].group == b.data.subjects[i].group);
    CHECK(a.data.subjects[i].covariates == b.data.subjects[i].covariates);
    CHECK(a.truth[i].latent_time == b.truth[i].latent_time);
    CHECK(a.truth[i].censor_time == b.truth[i].censor_time);
  }
  const Replication c = generate_replication(cfg, 4);
  CHECK(a.data.subjects[0].time != c.data.subjects[0].time);
}

TEST_CASE("zero-variance coefficients surface the degenerate error") {
  SimConfig cfg;
  cfg.n = 10;
  cfg.sigma_k = 0;  // kappa vectors all zero => w1 = w2 = 0 for every draw
  CHECK_THROWS_WITH(generate_replication(cfg, 0),
                    Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("observed data respect the ground-truth construction") {
  SimConfig cfg;
  cfg.n = 2000;
  cfg.seed = 5;
  const Replication rep = generate_replication(cfg, 0);
  for (std::size_t i = 0; i < rep.data.size(); ++i) {
    const Subject& s = rep.data.subjects[i];
    const GroundTruthRow& r = rep.truth[i];
    CHECK(s.time == std::min(r.latent_time, r.censor_time));
    if (r.latent_time <= r.censor_time)
      CHECK(s.event == r.latent_cause);
    else
      CHECK(s.event == kCensored);
  }
}

TEST_CASE("true CIFs satisfy the closed-form identities") {
  RandomStream rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    GroundTruthRow row;
    row.w1 = rng.uniform01() * 3;
    row.w2 = rng.uniform01() * 3;
    row.ws = rng.uniform01() * 2;
    if (row.w1 + row.w2 == 0) continue;
    const double t = rng.uniform01() * 3;
    const double surv = std::exp(
        -gompertz_cumhaz(GompertzParams(row.w1 + row.w2, row.ws), t));
    CHECK_THAT(true_cif(row, 1, t) + true_cif(row, 2, t) + surv,
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(true_cif(row, 1, t) <= true_marginal(row, 1, t) + 1e-15);
    CHECK(true_cif(row, 2, t) <= true_marginal(row, 2, t) + 1e-15);
  }
}

TEST_CASE("true CIF edge cases") {
  GroundTruthRow row;
  row.w1 = 0.7;
  row.w2 = 0;
  row.ws = 0.4;
  CHECK(true_cif(row, 1, 0) == 0);
  CHECK(true_marginal(row, 1, 0) == 0);
  for (double t : {0.3, 1.0, 4.0})
    CHECK_THAT(true_cif(row, 1, t),
               Catch::Matchers::WithinAbs(true_marginal(row, 1, t), 1e-14));
  row.w2 = 0.7;
  CHECK_THAT(true_cif(row, 1, 1e6), Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("true CIF matches latent Monte-Carlo frequencies") {
  GroundTruthRow row;
  row.w1 = 0.8;
  row.w2 = 1.4;
  row.ws = 0.6;
  const double t = 0.5;
  RandomStream rng(37);
  HazardParams w{row.w1, row.w2, row.ws, 0};
  const int n = 100000;
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    const LatentEvent ev = gen_events(w, rng);
    if (ev.time < t && ev.cause == 1) ++hit;
  }
  CHECK_THAT(static_cast<double>(hit) / n,
             Catch::Matchers::WithinAbs(true_cif(row, 1, t), 0.01));
}
