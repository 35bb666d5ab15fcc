#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crisk {

// Error taxonomy used across the library. DataError covers malformed or
// inconsistent inputs (files, schemas, empty groups); NumericError covers
// failures of the numerical machinery (non-convergence, degenerate hazards,
// exhausted censoring support).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Event codes: 0 is censored, 1..R are the competing event indices.
using EventCode = int;
inline constexpr EventCode kCensored = 0;

struct Subject {
  std::string id;
  std::vector<double> covariates;
  int group = 0;    // binary group label
  double time = 0;  // observed time T >= 0
  EventCode event = kCensored;
};

struct SurvivalDataset {
  std::vector<Subject> subjects;
  int n_risks = 0;       // R
  int n_covariates = 0;  // p

  std::size_t size() const { return subjects.size(); }

  void validate() const {
    if (subjects.empty()) throw DataError("dataset has no subjects");
    if (n_risks < 1) throw DataError("dataset must declare at least one risk");
    if (n_covariates < 0) throw DataError("negative covariate count");
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      const Subject& s = subjects[i];
      if (static_cast<int>(s.covariates.size()) != n_covariates)
        throw DataError("subject " + s.id + ": covariate length " +
                        std::to_string(s.covariates.size()) + " != declared p " +
                        std::to_string(n_covariates));
      if (!(s.time >= 0) || !std::isfinite(s.time))
        throw DataError("subject " + s.id + ": time must be finite and >= 0");
      if (s.event < 0 || s.event > n_risks)
        throw DataError("subject " + s.id + ": event code " +
                        std::to_string(s.event) + " outside {0.." +
                        std::to_string(n_risks) + "}");
      if (s.group != 0 && s.group != 1)
        throw DataError("subject " + s.id + ": group label must be 0 or 1");
    }
  }
};

/**
 * Right-continuous piecewise-constant function on [0, inf).
 *
 * Value at t is the value attached to the largest jump time <= t, or
 * initial_value when t precedes all jumps. Jump times are strictly
 * increasing; duplicates are rejected at construction.
 */
class StepFunction {
 public:
  StepFunction() : initial_value_(0) {}

  // Jumps are stored sorted; duplicate jump times are rejected.
  StepFunction(double initial_value, std::vector<double> jump_times,
               std::vector<double> values)
      : initial_value_(initial_value),
        jump_times_(std::move(jump_times)),
        values_(std::move(values)) {
    if (jump_times_.size() != values_.size())
      throw DataError("step function: jump_times and values lengths differ");
    if (!std::is_sorted(jump_times_.begin(), jump_times_.end())) {
      std::vector<std::size_t> order(jump_times_.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [this](std::size_t a, std::size_t b) {
                  return jump_times_[a] < jump_times_[b];
                });
      std::vector<double> t(jump_times_.size()), v(values_.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        t[i] = jump_times_[order[i]];
        v[i] = values_[order[i]];
      }
      jump_times_ = std::move(t);
      values_ = std::move(v);
    }
    for (std::size_t i = 0; i < jump_times_.size(); ++i) {
      if (!std::isfinite(jump_times_[i]) || jump_times_[i] < 0)
        throw DataError("step function: jump times must be finite and >= 0");
      if (i > 0 && jump_times_[i] == jump_times_[i - 1])
        throw DataError("step function: duplicate jump time " +
                        std::to_string(jump_times_[i]));
    }
  }

  double initial_value() const { return initial_value_; }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values() const { return values_; }

  // Value at t (right-continuous).
  double operator()(double t) const {
    auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
    if (it == jump_times_.begin()) return initial_value_;
    return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
  }

  // Left limit at t: value attached to the largest jump time strictly < t.
  double left(double t) const {
    auto it = std::lower_bound(jump_times_.begin(), jump_times_.end(), t);
    if (it == jump_times_.begin()) return initial_value_;
    return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
  }

 private:
  double initial_value_;
  std::vector<double> jump_times_;
  std::vector<double> values_;
};

inline double step_eval(const StepFunction& f, double t) { return f(t); }
inline double step_eval_left(const StepFunction& f, double t) { return f.left(t); }

// Curve-shape checks used when a StepFunction stands for a survival curve
// or a CIF. Not enforced at construction (baseline cumulative hazards are
// neither).
inline bool is_survival_curve(const StepFunction& f, double tol = 1e-12) {
  if (std::abs(f.initial_value() - 1.0) > tol) return false;
  double prev = f.initial_value();
  for (double v : f.values()) {
    if (v < -tol || v > 1 + tol || v > prev + tol) return false;
    prev = v;
  }
  return true;
}

inline bool is_cif_curve(const StepFunction& f, double tol = 1e-12) {
  if (std::abs(f.initial_value()) > tol) return false;
  double prev = f.initial_value();
  for (double v : f.values()) {
    if (v < -tol || v > 1 + tol || v < prev - tol) return false;
    prev = v;
  }
  return true;
}

struct Horizon {
  double t = 0;
  std::string label;
};

/**
 * Lower (inverse-CDF) quantile of the uncensored event times: the smallest
 * observed time t with an event such that the fraction of uncensored times
 * <= t is at least q.
 */
inline Horizon event_time_quantile(const SurvivalDataset& data, double q) {
  if (q < 0 || q > 1) throw DataError("quantile level must be in [0, 1]");
  std::vector<double> times;
  times.reserve(data.subjects.size());
  for (const Subject& s : data.subjects)
    if (s.event != kCensored) times.push_back(s.time);
  if (times.empty()) throw DataError("no uncensored events");
  std::sort(times.begin(), times.end());
  const double n = static_cast<double>(times.size());
  std::size_t k = 0;
  while (k + 1 < times.size() && (static_cast<double>(k) + 1.0) / n < q) ++k;
  Horizon h;
  h.t = times[k];
  char buf[32];
  std::snprintf(buf, sizeof(buf), "q%g", q);
  h.label = buf;
  return h;
}

}  // namespace crisk
