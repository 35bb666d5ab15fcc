#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <vector>

#include "crisk/types.hpp"

namespace crisk {

/**
 * Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
 * on the Legendre polynomial. Symmetric pairs are generated together.
 */
inline void gauss_legendre_rule(int n, std::vector<double>& nodes,
                                std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based starting guess for the i-th root.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

namespace detail {

struct GaussRule {
  std::vector<double> nodes, weights;
};

// Cached rules for the doubling ladder 64, 128, ..., 8192. Thread-safe.
inline const GaussRule& cached_rule(int n) {
  static constexpr std::array<int, 8> sizes = {64,   128,  256,  512,
                                               1024, 2048, 4096, 8192};
  static GaussRule rules[sizes.size()];
  static std::once_flag flags[sizes.size()];
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == n) {
      std::call_once(flags[i], [i]() {
        gauss_legendre_rule(sizes[i], rules[i].nodes, rules[i].weights);
      });
      return rules[i];
    }
  }
  throw NumericError("unsupported quadrature size " + std::to_string(n));
}

}  // namespace detail

template <typename F>
double gauss_legendre(const F& f, double a, double b, int n) {
  const auto& rule = detail::cached_rule(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct QuadratureResult {
  double value = 0;
  int nodes = 0;
  bool converged = false;
};

// Doubles the node count from n0 until successive estimates agree within
// tol (absolute), starting at 64 nodes by default.
template <typename F>
QuadratureResult integrate_to_tol(const F& f, double a, double b,
                                  double tol = 1e-8, int n0 = 64,
                                  int n_max = 8192) {
  QuadratureResult res;
  double prev = gauss_legendre(f, a, b, n0);
  for (int n = 2 * n0; n <= n_max; n *= 2) {
    const double cur = gauss_legendre(f, a, b, n);
    if (std::abs(cur - prev) < tol) {
      res.value = cur;
      res.nodes = n;
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.nodes = n_max;
  res.converged = false;
  return res;
}

}  // namespace crisk
