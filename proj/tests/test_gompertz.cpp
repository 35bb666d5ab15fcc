#include <algorithm>
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "crisk/gompertz.hpp"
#include "crisk/rng.hpp"

using namespace crisk;

TEST_CASE("gompertz sampling inverts the cumulative hazard") {
  CHECK_THAT(sample_gompertz(GompertzParams(1, 0), std::exp(-1.0)),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(sample_gompertz(GompertzParams(1, 1), std::exp(-(std::exp(1.0) - 1))),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(sample_gompertz(GompertzParams(2, 0), std::exp(-1.0)),
             Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("gompertz sampling rejects degenerate inputs") {
  CHECK_THROWS_WITH(sample_gompertz(GompertzParams(0, 1), 0.5),
                    Catch::Matchers::ContainsSubstring("degenerate hazard"));
  CHECK_THROWS_AS(sample_gompertz(GompertzParams(1, 0), 0.0), DataError);
  CHECK_THROWS_AS(sample_gompertz(GompertzParams(1, 0), 1.0), DataError);
  CHECK_THROWS_AS(GompertzParams(-1, 0), DataError);
  CHECK_THROWS_AS(GompertzParams(1, -1), DataError);
}

TEST_CASE("gompertz cdf closed forms") {
  CHECK(gompertz_cdf(GompertzParams(3, 2), 0) == 0.0);
  CHECK_THAT(gompertz_cdf(GompertzParams(1, 0), 1),
             Catch::Matchers::WithinAbs(1 - std::exp(-1.0), 1e-15));
  CHECK_THAT(gompertz_cdf(GompertzParams(1, 1), 1),
             Catch::Matchers::WithinAbs(1 - std::exp(-(std::exp(1.0) - 1)), 1e-15));
}

TEST_CASE("gompertz pdf matches a numerical derivative of the cdf") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {0.5, 2.0}}) {
    const GompertzParams g(a, b);
    for (double t : {0.1, 0.7, 1.3}) {
      const double h = 1e-6;
      const double numeric =
          (gompertz_cdf(g, t + h) - gompertz_cdf(g, t - h)) / (2 * h);
      CHECK_THAT(gompertz_pdf(g, t), Catch::Matchers::WithinAbs(numeric, 1e-6));
    }
  }
}

TEST_CASE("sampled draws follow the cdf (Kolmogorov-Smirnov)") {
  RandomStream rng(2718);
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {0.5, 1.5}}) {
    const GompertzParams g(a, b);
    const int n = 10000;
    std::vector<double> draws(n);
    for (double& d : draws) d = sample_gompertz(g, rng.uniform01());
    std::sort(draws.begin(), draws.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) {
      const double f = gompertz_cdf(g, draws[static_cast<std::size_t>(i)]);
      ks = std::max(ks, std::abs((i + 1.0) / n - f));
      ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.02);
  }
}

TEST_CASE("inverse cumulative hazard round-trips") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {0.3, 0.7}}) {
    const GompertzParams g(a, b);
    for (double h : {0.01, 0.5, 3.0, 40.0}) {
      CHECK_THAT(gompertz_cumhaz(g, gompertz_inv_cumhaz(g, h)),
                 Catch::Matchers::WithinRel(h, 1e-12));
    }
  }
}
