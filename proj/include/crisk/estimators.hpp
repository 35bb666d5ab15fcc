#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "crisk/types.hpp"

namespace crisk {

namespace detail {

// Subjects ordered by (time, original index); shared by every estimator so
// tie handling is identical across them.
inline std::vector<std::size_t> time_order(const SurvivalDataset& data) {
  std::vector<std::size_t> order(data.subjects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (data.subjects[a].time != data.subjects[b].time)
      return data.subjects[a].time < data.subjects[b].time;
    return a < b;
  });
  return order;
}

// Generic product-limit estimator: S(t) = prod_{t_k <= t} (1 - d_k / n_k)
// where d_k counts subjects matching `is_event` at t_k and n_k counts
// subjects with T >= t_k.
template <typename Pred>
StepFunction product_limit(const SurvivalDataset& data, Pred is_event) {
  const auto order = time_order(data);
  const std::size_t n = order.size();
  std::vector<double> jumps, values;
  double surv = 1.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = data.subjects[order[i]].time;
    const std::size_t at_risk = n - i;
    std::size_t d = 0;
    std::size_t j = i;
    while (j < n && data.subjects[order[j]].time == t) {
      if (is_event(data.subjects[order[j]])) ++d;
      ++j;
    }
    if (d > 0) {
      surv *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
      jumps.push_back(t);
      values.push_back(surv);
    }
    i = j;
  }
  return StepFunction(1.0, std::move(jumps), std::move(values));
}

}  // namespace detail

// Kaplan-Meier survival of the recoded single event: every event other than
// `cause` is treated as censoring. 1 - S is the naive nonparametric CIF.
inline StepFunction kaplan_meier(const SurvivalDataset& data, int cause) {
  if (data.subjects.empty()) throw DataError("kaplan_meier: empty dataset");
  return detail::product_limit(
      data, [cause](const Subject& s) { return s.event == cause; });
}

// All-cause Kaplan-Meier (any event counts).
inline StepFunction all_cause_survival(const SurvivalDataset& data) {
  if (data.subjects.empty()) throw DataError("all_cause_survival: empty dataset");
  return detail::product_limit(
      data, [](const Subject& s) { return s.event != kCensored; });
}

// Censoring survival Ghat: Kaplan-Meier with censoring as the event and all
// true events censoring the censoring process.
inline StepFunction censoring_survival(const SurvivalDataset& data) {
  if (data.subjects.empty()) throw DataError("censoring_survival: empty dataset");
  return detail::product_limit(
      data, [](const Subject& s) { return s.event == kCensored; });
}

// Aalen-Johansen CIF for one cause:
//   F_r(t) = sum_{t_k <= t} S(t_k-) d_{r,k} / n_k
// with S the all-cause Kaplan-Meier. Ties across causes are handled in the
// same pass so that sum_r F_r(t) + S(t) = 1 at every observed time.
inline StepFunction aalen_johansen(const SurvivalDataset& data, int cause) {
  if (data.subjects.empty()) throw DataError("aalen_johansen: empty dataset");
  const auto order = detail::time_order(data);
  const std::size_t n = order.size();
  std::vector<double> jumps, values;
  double surv_minus = 1.0;
  double cif = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = data.subjects[order[i]].time;
    const std::size_t at_risk = n - i;
    std::size_t d_all = 0, d_cause = 0;
    std::size_t j = i;
    while (j < n && data.subjects[order[j]].time == t) {
      const int ev = data.subjects[order[j]].event;
      if (ev != kCensored) ++d_all;
      if (ev == cause) ++d_cause;
      ++j;
    }
    if (d_cause > 0) {
      cif += surv_minus * static_cast<double>(d_cause) / static_cast<double>(at_risk);
      jumps.push_back(t);
      values.push_back(cif);
    }
    if (d_all > 0)
      surv_minus *= 1.0 - static_cast<double>(d_all) / static_cast<double>(at_risk);
    i = j;
  }
  return StepFunction(0.0, std::move(jumps), std::move(values));
}

struct Convergence {
  int iterations = 0;
  double grad_norm = 0;
  std::vector<double> loglik_trace;  // log partial likelihood per accepted step
  std::vector<std::string> warnings;
};

struct ConvergenceError : NumericError {
  ConvergenceError(const std::string& msg, Convergence trace_)
      : NumericError(msg), trace(std::move(trace_)) {}
  Convergence trace;
};

struct FittedCox {
  std::vector<double> beta;
  StepFunction baseline_cumhaz;  // Breslow estimate of H0
  int cause = 1;
  Convergence convergence;
};

struct FittedFineGray {
  std::vector<double> beta;
  StepFunction baseline_cum_subhaz;
  int cause = 1;
  StepFunction censoring_survival;  // Ghat used for the IPCW weights
  Convergence convergence;
};

namespace detail {

// Solves the symmetric positive-definite system a * x = b in place
// (a row-major p x p, lower triangle used). Returns false when a pivot
// collapses, i.e. the information matrix is singular.
inline bool cholesky_solve(std::vector<double>& a, std::vector<double>& b,
                           std::size_t p) {
  double max_diag = 0;
  for (std::size_t i = 0; i < p; ++i)
    max_diag = std::max(max_diag, std::abs(a[i * p + i]));
  const double tiny = std::max(max_diag, 1.0) * 1e-12;
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > tiny)) return false;
    d = std::sqrt(d);
    a[j * p + j] = d;
    for (std::size_t i = j + 1; i < p; ++i) {
      double v = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = v / d;
    }
  }
  for (std::size_t i = 0; i < p; ++i) {  // L y = b
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * p + k] * b[k];
    b[i] = v / a[i * p + i];
  }
  for (std::size_t ii = p; ii-- > 0;) {  // L^T x = y
    double v = b[ii];
    for (std::size_t k = ii + 1; k < p; ++k) v -= a[k * p + ii] * b[k];
    b[ii] = v / a[ii * p + ii];
  }
  return true;
}

/**
 * Weighted proportional-hazards engine shared by fit_cox and fit_fine_gray.
 *
 * status: 1 = target event, 0 = leaves the risk set, 2 = competing event
 * retained with IPCW weight Ghat(t-) / Ghat(T_j-) (Fine-Gray risk set).
 * Cox fits pass no Ghat and recode competing events to 0 beforehand; with no
 * status-2 subjects both models evaluate the identical partial likelihood.
 *
 * Breslow tie handling throughout; Newton-Raphson from beta = 0 with
 * step-halving, gradient max-norm tolerance 1e-8, at most 100 iterations.
 */
class PHEngine {
 public:
  PHEngine(const SurvivalDataset& data, std::vector<int> status,
           const StepFunction* ghat)
      : data_(data), status_(std::move(status)), n_(data.subjects.size()),
        p_(static_cast<std::size_t>(data.n_covariates)), pp_(p_ * p_) {
    order_ = time_order(data);
    standardize();
    index_event_times();
    if (ghat) prepare_weights(*ghat);
  }

  const Convergence& convergence() const { return conv_; }
  std::vector<std::string>& warnings() { return conv_.warnings; }

  // Runs the fit; returns beta on the original covariate scale.
  std::vector<double> fit() {
    std::vector<double> beta(p_, 0.0);
    double ll = evaluate(beta, true);
    conv_.loglik_trace.push_back(ll);
    bool converged = p_ == 0 || grad_max_norm() < kGradTol;
    while (!converged && conv_.iterations < kMaxIter) {
      std::vector<double> step = grad_;
      std::vector<double> info = info_;
      if (!cholesky_solve(info, step, p_))
        throw DataError("collinear covariates: singular information matrix");
      double lambda = 1.0;
      std::vector<double> candidate(p_);
      double ll_new = -std::numeric_limits<double>::infinity();
      bool accepted = false;
      for (int h = 0; h < 40; ++h) {
        for (std::size_t j = 0; j < p_; ++j)
          candidate[j] = beta[j] + lambda * step[j];
        ll_new = evaluate(candidate, false);
        if (ll_new >= ll - 1e-12 * (1.0 + std::abs(ll))) {
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted)
        throw ConvergenceError(
            "Newton-Raphson stalled: step halving failed to improve the log "
            "partial likelihood (gradient max-norm " +
                std::to_string(grad_max_norm()) + ")",
            conv_);
      beta = candidate;
      ll = evaluate(beta, true);
      ++conv_.iterations;
      conv_.loglik_trace.push_back(ll);
      converged = grad_max_norm() < kGradTol;
    }
    conv_.grad_norm = grad_max_norm();
    if (!converged)
      throw ConvergenceError(
          "Newton-Raphson did not converge within " + std::to_string(kMaxIter) +
              " iterations (gradient max-norm " + std::to_string(conv_.grad_norm) + ")",
          conv_);
    // Refresh risk sums at the accepted beta for the baseline estimate.
    evaluate(beta, false);
    destandardized_ = destandardize(beta);
    return destandardized_;
  }

  // Breslow baseline cumulative hazard at the fitted beta, on the original
  // covariate scale.
  StepFunction baseline() const {
    double offset = 0;  // beta_x . mu, folded into the baseline
    for (std::size_t j = 0; j < p_; ++j) offset += destandardized_[j] * mean_[j];
    std::vector<double> jumps, values;
    jumps.reserve(event_times_.size());
    values.reserve(event_times_.size());
    double h = 0;
    for (std::size_t k = 0; k < event_times_.size(); ++k) {
      h += static_cast<double>(event_count_[k]) / (s0_true_[k] * std::exp(offset));
      jumps.push_back(event_times_[k]);
      values.push_back(h);
    }
    return StepFunction(0.0, std::move(jumps), std::move(values));
  }

 private:
  static constexpr double kGradTol = 1e-8;
  static constexpr int kMaxIter = 100;

  void standardize() {
    mean_.assign(p_, 0.0);
    scale_.assign(p_, 0.0);
    z_.assign(n_ * p_, 0.0);
    if (p_ == 0) return;
    for (const Subject& s : data_.subjects)
      for (std::size_t j = 0; j < p_; ++j) mean_[j] += s.covariates[j];
    for (std::size_t j = 0; j < p_; ++j) mean_[j] /= static_cast<double>(n_);
    for (const Subject& s : data_.subjects)
      for (std::size_t j = 0; j < p_; ++j) {
        const double d = s.covariates[j] - mean_[j];
        scale_[j] += d * d;
      }
    for (std::size_t j = 0; j < p_; ++j) {
      scale_[j] = std::sqrt(scale_[j] / static_cast<double>(n_));
      if (!(scale_[j] > 0))
        throw DataError("collinear covariates: covariate " + std::to_string(j) +
                        " is constant");
    }
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < p_; ++j)
        z_[i * p_ + j] = (data_.subjects[i].covariates[j] - mean_[j]) / scale_[j];
  }

  std::vector<double> destandardize(const std::vector<double>& beta_z) const {
    std::vector<double> beta(p_);
    for (std::size_t j = 0; j < p_; ++j) beta[j] = beta_z[j] / scale_[j];
    return beta;
  }

  void index_event_times() {
    // Distinct target-event times (ascending), the events at each, and the
    // boundary into the sorted order: subjects order_[pos..] have T >= t_k.
    std::size_t i = 0;
    while (i < n_) {
      const double t = data_.subjects[order_[i]].time;
      std::size_t j = i;
      std::size_t d = 0;
      while (j < n_ && data_.subjects[order_[j]].time == t) {
        if (status_[order_[j]] == 1) ++d;
        ++j;
      }
      if (d > 0) {
        event_times_.push_back(t);
        event_count_.push_back(d);
        risk_boundary_.push_back(i);
      }
      i = j;
    }
    if (event_times_.empty()) throw DataError("no events of the target cause");
  }

  void prepare_weights(const StepFunction& ghat) {
    use_weights_ = true;
    double g_min_pos = 1.0;
    for (double v : ghat.values())
      if (v > 0) g_min_pos = std::min(g_min_pos, v);
    auto clamped_left = [&](double t) {
      const double g = step_eval_left(ghat, t);
      return g > 0 ? g : g_min_pos;
    };
    // Denominator per competing subject, numerator per event time.
    inv_g_at_entry_.assign(n_, 0.0);
    bool truncated = false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (status_[i] != 2) continue;
      const double g = step_eval_left(ghat, data_.subjects[i].time);
      if (g <= 0) truncated = true;
      inv_g_at_entry_[i] = 1.0 / (g > 0 ? g : g_min_pos);
    }
    g_at_event_.resize(event_times_.size());
    for (std::size_t k = 0; k < event_times_.size(); ++k) {
      const double g = step_eval_left(ghat, event_times_[k]);
      if (g <= 0) truncated = true;
      g_at_event_[k] = clamped_left(event_times_[k]);
    }
    if (truncated)
      conv_.warnings.push_back(
          "censoring survival reached 0 before the last target event; IPCW "
          "weights truncated at the last time Ghat > 0");
  }

  double grad_max_norm() const {
    double m = 0;
    for (double g : grad_) m = std::max(m, std::abs(g));
    return m;
  }

  // Log partial likelihood at beta (on the standardized scale); fills the
  // gradient and information matrix when with_derivs is set, and always
  // refreshes s0_true_ (used by the baseline).
  double evaluate(const std::vector<double>& beta, bool with_derivs) {
    const std::size_t nk = event_times_.size();
    eta_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < p_; ++j) eta_[i] += z_[i * p_ + j] * beta[j];
    double shift = 0;
    for (double e : eta_) shift = std::max(shift, e);
    expeta_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) expeta_[i] = std::exp(eta_[i] - shift);

    // Prefix sums over competing subjects with T < t_k (Fine-Gray retention).
    if (use_weights_) {
      b0_.assign(nk, 0.0);
      if (with_derivs) {
        b1_.assign(nk * p_, 0.0);
        b2_.assign(nk * pp_, 0.0);
      }
      double b0 = 0;
      std::vector<double> b1(p_, 0.0), b2(pp_, 0.0);
      std::size_t pos = 0;
      for (std::size_t k = 0; k < nk; ++k) {
        while (pos < n_ && data_.subjects[order_[pos]].time < event_times_[k]) {
          const std::size_t i = order_[pos];
          if (status_[i] == 2) {
            const double w = expeta_[i] * inv_g_at_entry_[i];
            b0 += w;
            if (with_derivs) {
              for (std::size_t a = 0; a < p_; ++a) b1[a] += w * z_[i * p_ + a];
              for (std::size_t a = 0; a < p_; ++a)
                for (std::size_t b = a; b < p_; ++b)
                  b2[a * p_ + b] += w * z_[i * p_ + a] * z_[i * p_ + b];
            }
          }
          ++pos;
        }
        b0_[k] = b0;
        if (with_derivs) {
          std::copy(b1.begin(), b1.end(), b1_.begin() + static_cast<std::ptrdiff_t>(k * p_));
          std::copy(b2.begin(), b2.end(), b2_.begin() + static_cast<std::ptrdiff_t>(k * pp_));
        }
      }
    }

    // Suffix sums over subjects with T >= t_k, consumed in descending order.
    if (with_derivs) {
      grad_.assign(p_, 0.0);
      info_.assign(pp_, 0.0);
    }
    s0_true_.assign(nk, 0.0);
    double ll = 0;
    double a0 = 0;
    std::vector<double> a1(p_, 0.0), a2(pp_, 0.0);
    std::size_t pos = n_;
    for (std::size_t kk = nk; kk-- > 0;) {
      while (pos > risk_boundary_[kk]) {
        const std::size_t i = order_[--pos];
        const double w = expeta_[i];
        a0 += w;
        if (with_derivs) {
          for (std::size_t a = 0; a < p_; ++a) a1[a] += w * z_[i * p_ + a];
          for (std::size_t a = 0; a < p_; ++a)
            for (std::size_t b = a; b < p_; ++b)
              a2[a * p_ + b] += w * z_[i * p_ + a] * z_[i * p_ + b];
        }
      }
      double s0 = a0;
      if (use_weights_) s0 += g_at_event_[kk] * b0_[kk];
      s0_true_[kk] = s0 * std::exp(shift);
      const double d = static_cast<double>(event_count_[kk]);
      ll -= d * (std::log(s0) + shift);
      if (with_derivs) {
        u_.assign(p_, 0.0);
        for (std::size_t a = 0; a < p_; ++a) {
          double s1 = a1[a];
          if (use_weights_) s1 += g_at_event_[kk] * b1_[kk * p_ + a];
          u_[a] = s1 / s0;
          grad_[a] -= d * u_[a];
        }
        for (std::size_t a = 0; a < p_; ++a)
          for (std::size_t b = a; b < p_; ++b) {
            double s2 = a2[a * p_ + b];
            if (use_weights_) s2 += g_at_event_[kk] * b2_[kk * pp_ + a * p_ + b];
            info_[a * p_ + b] += d * (s2 / s0 - u_[a] * u_[b]);
          }
      }
    }
    // Event-subject terms and symmetric fill.
    for (std::size_t i = 0; i < n_; ++i) {
      if (status_[i] != 1) continue;
      ll += eta_[i];
      if (with_derivs)
        for (std::size_t a = 0; a < p_; ++a) grad_[a] += z_[i * p_ + a];
    }
    if (with_derivs)
      for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = 0; b < a; ++b) info_[a * p_ + b] = info_[b * p_ + a];
    return ll;
  }

  const SurvivalDataset& data_;
  std::vector<int> status_;
  std::size_t n_, p_, pp_;
  std::vector<std::size_t> order_;
  std::vector<double> mean_, scale_, z_;
  std::vector<double> event_times_;
  std::vector<std::size_t> event_count_, risk_boundary_;
  bool use_weights_ = false;
  std::vector<double> inv_g_at_entry_, g_at_event_;
  std::vector<double> eta_, expeta_, b0_, b1_, b2_, s0_true_, grad_, info_, u_;
  std::vector<double> destandardized_;
  Convergence conv_;
};

}  // namespace detail

// Cox fit on the recoded data: every event other than `cause` becomes
// censoring. Breslow ties, Newton-Raphson from beta = 0.
inline FittedCox fit_cox(const SurvivalDataset& data, int cause) {
  data.validate();
  std::vector<int> status(data.subjects.size(), 0);
  for (std::size_t i = 0; i < data.subjects.size(); ++i)
    status[i] = data.subjects[i].event == cause ? 1 : 0;
  detail::PHEngine engine(data, std::move(status), nullptr);
  FittedCox fit;
  fit.cause = cause;
  fit.beta = engine.fit();
  fit.baseline_cumhaz = engine.baseline();
  fit.convergence = engine.convergence();
  return fit;
}

// Fine-Gray fit: competing-event subjects remain in the risk set with IPCW
// weight Ghat(t-)/Ghat(min(T_i, t)-), censored subjects leave at C_i.
inline FittedFineGray fit_fine_gray(const SurvivalDataset& data, int cause) {
  data.validate();
  std::vector<int> status(data.subjects.size(), 0);
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const int ev = data.subjects[i].event;
    status[i] = ev == cause ? 1 : (ev == kCensored ? 0 : 2);
  }
  StepFunction ghat = censoring_survival(data);
  detail::PHEngine engine(data, std::move(status), &ghat);
  FittedFineGray fit;
  fit.cause = cause;
  fit.censoring_survival = ghat;
  fit.beta = engine.fit();
  fit.baseline_cum_subhaz = engine.baseline();
  fit.convergence = engine.convergence();
  return fit;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Naive marginal CIF from the recoded Cox model.
inline double predict_cox_cif(const FittedCox& model, const std::vector<double>& x,
                              double t) {
  const double h = step_eval(model.baseline_cumhaz, t);
  return -std::expm1(-h * std::exp(dot(model.beta, x)));
}

inline double predict_cox_survival(const FittedCox& model,
                                   const std::vector<double>& x, double t) {
  return 1.0 - predict_cox_cif(model, x, t);
}

// Fine-Gray CIF: 1 - exp(-H_{r,0}(t) e^{beta x}).
inline double predict_fg_cif(const FittedFineGray& model,
                             const std::vector<double>& x, double t) {
  const double h = step_eval(model.baseline_cum_subhaz, t);
  return -std::expm1(-h * std::exp(dot(model.beta, x)));
}

}  // namespace crisk
