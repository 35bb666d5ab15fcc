#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "crisk/types.hpp"

namespace crisk {

/**
 * Treatment-threshold rule: treat subjects strictly older than min_age whose
 * predicted cause-r risk at the policy horizon is at least `threshold`.
 */
struct DecisionPolicy {
  double threshold = 0.10;
  Horizon horizon;
  int age_covariate = -1;  // covariate column holding "age"
  std::string age_name;    // display name, e.g. "x2"
  double min_age = 40;

  void validate(int n_covariates) const {
    if (!(threshold > 0 && threshold < 1))
      throw DataError("decision policy: threshold must lie in (0, 1)");
    if (min_age < 0) throw DataError("decision policy: min_age must be >= 0");
    if (age_covariate < 0 || age_covariate >= n_covariates)
      throw DataError("decision policy: age covariate " +
                      (age_name.empty() ? std::to_string(age_covariate) : age_name) +
                      " not present in dataset");
  }
};

// Treated <=> age > min_age and predicted risk >= threshold.
inline std::vector<char> classify(const std::vector<double>& predictions,
                                  const SurvivalDataset& data,
                                  const DecisionPolicy& policy) {
  policy.validate(data.n_covariates);
  if (predictions.size() != data.subjects.size())
    throw DataError("classify: predictions misaligned with subjects");
  std::vector<char> treated(data.subjects.size(), 0);
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const double age =
        data.subjects[i].covariates[static_cast<std::size_t>(policy.age_covariate)];
    treated[i] = age > policy.min_age && predictions[i] >= policy.threshold;
  }
  return treated;
}

// Outcome by the horizon: 0 = target event, 1 = competing event, 2 = none
// observed (still event-free at the horizon, or censored before it).
enum class HorizonOutcome { kTarget = 0, kCompeting = 1, kNone = 2 };

inline HorizonOutcome outcome_at_horizon(const Subject& s, double t, int cause) {
  if (s.time <= t && s.event == cause) return HorizonOutcome::kTarget;
  if (s.time <= t && s.event != kCensored) return HorizonOutcome::kCompeting;
  return HorizonOutcome::kNone;
}

/**
 * Treatment cross-tab over the age-eligible population (the denominator for
 * every fraction): cells[treated][outcome], treated fraction, and the
 * over-/under-treatment fractions (treated without the target outcome;
 * untreated with it).
 */
struct DecisionCrossTab {
  std::size_t eligible = 0;
  double treated_frac = 0;
  std::array<std::array<double, 3>, 2> cells{};  // [treated][outcome]
  double overtreatment = 0;
  double undertreatment = 0;
};

inline DecisionCrossTab decision_crosstab(const std::vector<char>& treated,
                                          const SurvivalDataset& data,
                                          const DecisionPolicy& policy,
                                          const std::vector<char>& in_scope,
                                          int cause) {
  DecisionCrossTab tab;
  std::array<std::array<std::size_t, 3>, 2> counts{};
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    if (!in_scope[i]) continue;
    const double age =
        data.subjects[i].covariates[static_cast<std::size_t>(policy.age_covariate)];
    if (!(age > policy.min_age)) continue;
    ++tab.eligible;
    const auto o = static_cast<std::size_t>(
        outcome_at_horizon(data.subjects[i], policy.horizon.t, cause));
    counts[treated[i] ? 1 : 0][o] += 1;
  }
  if (tab.eligible == 0) throw DataError("no age-eligible subjects");
  const double denom = static_cast<double>(tab.eligible);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t o = 0; o < 3; ++o)
      tab.cells[a][o] = static_cast<double>(counts[a][o]) / denom;
  tab.treated_frac = tab.cells[1][0] + tab.cells[1][1] + tab.cells[1][2];
  tab.overtreatment = tab.cells[1][1] + tab.cells[1][2];
  tab.undertreatment = tab.cells[0][0];
  return tab;
}

/**
 * Side-by-side decision analysis of the competing-risk model and its naive
 * alternative, overall and stratified by a binary grouping.
 */
struct DecisionReport {
  DecisionPolicy policy;
  int cause = 1;
  std::array<DecisionCrossTab, 2> overall;                  // [0]=competing, [1]=non-competing
  std::array<std::array<DecisionCrossTab, 2>, 2> per_group;  // [model][group]
};

inline DecisionReport decision_report(const std::vector<double>& pred_c,
                                      const std::vector<double>& pred_nc,
                                      const SurvivalDataset& data,
                                      const DecisionPolicy& policy,
                                      const std::vector<int>& groups, int cause) {
  if (groups.size() != data.subjects.size())
    throw DataError("decision_report: groups misaligned with subjects");
  DecisionReport rep;
  rep.policy = policy;
  rep.cause = cause;
  const std::array<std::vector<char>, 2> treated = {classify(pred_c, data, policy),
                                                    classify(pred_nc, data, policy)};
  std::vector<char> all(data.subjects.size(), 1);
  std::array<std::vector<char>, 2> in_group;
  std::array<std::size_t, 2> group_count{};
  for (int g = 0; g < 2; ++g) {
    in_group[static_cast<std::size_t>(g)].resize(data.subjects.size());
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
      if (groups[i] != 0 && groups[i] != 1)
        throw DataError("decision_report: labels must be 0/1");
      in_group[static_cast<std::size_t>(g)][i] = groups[i] == g;
      if (groups[i] == g) ++group_count[static_cast<std::size_t>(g)];
    }
  }
  if (group_count[0] == 0 || group_count[1] == 0) throw DataError("empty group");
  for (std::size_t m = 0; m < 2; ++m) {
    rep.overall[m] = decision_crosstab(treated[m], data, policy, all, cause);
    for (std::size_t g = 0; g < 2; ++g)
      rep.per_group[m][g] =
          decision_crosstab(treated[m], data, policy, in_group[g], cause);
  }
  return rep;
}

}  // namespace crisk
