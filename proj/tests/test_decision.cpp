#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "crisk/decision.hpp"
#include "crisk/rng.hpp"

using namespace crisk;

namespace {

// One "age" covariate; groups alternate.
SurvivalDataset aged(const std::vector<double>& ages,
                     const std::vector<double>& times,
                     const std::vector<int>& events) {
  SurvivalDataset data;
  data.n_risks = 2;
  data.n_covariates = 1;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    Subject s;
    s.id = std::to_string(i);
    s.covariates = {ages[i]};
    s.group = static_cast<int>(i % 2);
    s.time = times[i];
    s.event = events[i];
    data.subjects.push_back(s);
  }
  return data;
}

DecisionPolicy policy_at(double threshold, double min_age, double t) {
  DecisionPolicy p;
  p.threshold = threshold;
  p.horizon = Horizon{t, "t"};
  p.age_covariate = 0;
  p.age_name = "x0";
  p.min_age = min_age;
  return p;
}

}  // namespace

TEST_CASE("classification follows the age gate and risk threshold") {
  const auto data = aged({50, 50, 35}, {1, 1, 1}, {1, 1, 1});
  const auto p = policy_at(0.10, 40, 10);
  const auto treated = classify({0.15, 0.05, 0.50}, data, p);
  CHECK(treated[0] == 1);  // age 50, risk 0.15
  CHECK(treated[1] == 0);  // risk below threshold
  CHECK(treated[2] == 0);  // age gate
}

TEST_CASE("threshold boundary is inclusive, age boundary strict") {
  const auto data = aged({40, 41}, {1, 1}, {1, 1});
  const auto p = policy_at(0.10, 40, 10);
  const auto treated = classify({0.10, 0.10}, data, p);
  CHECK(treated[0] == 0);  // age exactly 40 is not "> 40"
  CHECK(treated[1] == 1);  // risk exactly at threshold is treated
}

TEST_CASE("policy validation") {
  const auto data = aged({50}, {1}, {1});
  auto p = policy_at(0.10, 40, 10);
  p.age_covariate = 3;  // not present
  CHECK_THROWS_AS(classify({0.2}, data, p), DataError);
  p = policy_at(0.10, 40, 10);
  p.threshold = 1.5;
  CHECK_THROWS_AS(classify({0.2}, data, p), DataError);
  p = policy_at(0.10, -1, 10);
  CHECK_THROWS_AS(classify({0.2}, data, p), DataError);
}

TEST_CASE("cross-tab fractions account for every eligible subject") {
  // ages all eligible; outcomes: cause 1 at t<=5, competing, censored early,
  // event-free beyond horizon
  const auto data = aged({50, 60, 70, 80}, {1, 2, 3, 9}, {1, 2, 0, 1});
  const auto p = policy_at(0.10, 40, 5);
  const std::vector<double> pred = {0.2, 0.2, 0.05, 0.05};
  const auto treated = classify(pred, data, p);
  const std::vector<char> all(4, 1);
  const auto tab = decision_crosstab(treated, data, p, all, 1);
  CHECK(tab.eligible == 4);
  double total = 0;
  for (const auto& row : tab.cells)
    for (double c : row) total += c;
  CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-15));
  // treated: subjects 0 (outcome cause 1) and 1 (competing)
  CHECK_THAT(tab.treated_frac, Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(tab.overtreatment, Catch::Matchers::WithinAbs(0.25, 1e-15));
  // untreated with the event: none (subject 3's event is after the horizon)
  CHECK(tab.undertreatment == 0.0);
  // overtreatment plus correctly-treated equals treated fraction exactly
  CHECK(tab.overtreatment + tab.cells[1][0] == tab.treated_frac);
}

TEST_CASE("censored-before-horizon subjects land in the none column") {
  const auto data = aged({50}, {1}, {0});
  const auto p = policy_at(0.10, 40, 5);
  const std::vector<char> all(1, 1);
  const auto tab = decision_crosstab(classify({0.5}, data, p), data, p, all, 1);
  CHECK(tab.cells[1][2] == 1.0);
}

TEST_CASE("decision report compares models and groups") {
  RandomStream rng(71);
  std::vector<double> ages, times;
  std::vector<int> events;
  for (int i = 0; i < 400; ++i) {
    ages.push_back(30 + 40 * rng.uniform01());
    times.push_back(0.1 + 5 * rng.uniform01());
    events.push_back(static_cast<int>(rng.below(3)));
  }
  const auto data = aged(ages, times, events);
  std::vector<int> groups(400);
  for (int i = 0; i < 400; ++i) groups[static_cast<std::size_t>(i)] = i % 2;
  const auto p = policy_at(0.10, 40, 3);
  std::vector<double> pred_c(400), pred_nc(400);
  for (int i = 0; i < 400; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    pred_c[ui] = rng.uniform01() * 0.5;
    pred_nc[ui] = std::min(1.0, pred_c[ui] + 0.05);  // uniformly higher
  }

  SECTION("identical models give identical tables") {
    const auto rep = decision_report(pred_c, pred_c, data, p, groups, 1);
    CHECK(rep.overall[0].treated_frac == rep.overall[1].treated_frac);
    CHECK(rep.overall[0].overtreatment == rep.overall[1].overtreatment);
  }
  SECTION("uniformly higher predictions treat a superset") {
    const auto treated_c = classify(pred_c, data, p);
    const auto treated_nc = classify(pred_nc, data, p);
    for (int i = 0; i < 400; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (treated_c[ui]) CHECK(treated_nc[ui]);
    }
    const auto rep = decision_report(pred_c, pred_nc, data, p, groups, 1);
    CHECK(rep.overall[1].treated_frac >= rep.overall[0].treated_frac);
  }
  SECTION("group tables partition the overall one") {
    const auto rep = decision_report(pred_c, pred_nc, data, p, groups, 1);
    CHECK(rep.per_group[0][0].eligible + rep.per_group[0][1].eligible ==
          rep.overall[0].eligible);
  }
}

TEST_CASE("empty eligible population is an error") {
  const auto data = aged({30, 35}, {1, 1}, {1, 1});
  const auto p = policy_at(0.10, 40, 5);
  const std::vector<char> all(2, 1);
  CHECK_THROWS_WITH(decision_crosstab(classify({0.5, 0.5}, data, p), data, p, all, 1),
                    Catch::Matchers::ContainsSubstring("no age-eligible"));
}
