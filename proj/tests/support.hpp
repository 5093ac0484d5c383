#pragma once

// Helpers shared by the unit and acceptance tests: seeded random inputs and
// independent numerical oracles (series, finite sums, quadrature). None of the
// oracles call into the library's closed forms.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "brc/composite_param.hpp"
#include "brc/gaussian.hpp"

namespace brc::testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

  Eigen::VectorXd uniform_vec(std::size_t n, double lo, double hi) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  Eigen::VectorXd normal_vec(std::size_t n) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = normal();
    return v;
  }
  /// A A^T / d + floor I with A standard normal.
  Eigen::MatrixXd spd(std::size_t d, double floor = 0.2) {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd a(n, n);
    for (auto& x : a.reshaped()) x = normal();
    Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(d) + floor * Eigen::MatrixXd::Identity(n, n);
    return 0.5 * (s + s.transpose());
  }
  GaussianParam gaussian(std::size_t d) { return {normal_vec(d), spd(d)}; }
  /// Point strictly inside the probability simplex with `n` coordinates.
  Eigen::VectorXd simplex(std::size_t n) {
    Eigen::VectorXd v = uniform_vec(n, 0.05, 1.0);
    return v / v.sum();
  }
  std::vector<double> weights(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = uniform(0.1, 1.0));
    for (auto& x : w) x /= total;
    return w;
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------- densities

inline double poisson_pmf(double lambda, int x) {
  return std::exp(x * std::log(lambda) - lambda - std::lgamma(x + 1.0));
}

inline double normal_pdf(double mean, double var, double x) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * M_PI * var);
}

/// Sum over x = 0, 1, ... until both pmfs are negligible past their modes.
inline double poisson_series(double lp, double lq, const std::function<double(double, double, int)>& term) {
  double total = 0.0;
  const double top = std::max(lp, lq);
  for (int x = 0;; ++x) {
    const double pp = poisson_pmf(lp, x);
    const double pq = poisson_pmf(lq, x);
    total += term(pp, pq, x);
    if (x > top + 10 && pp < 1e-18 && pq < 1e-18) break;
  }
  return total;
}

/// Integral over the real line with the mass concentrated near both Gaussians,
/// split into panels so the adaptive rule sees smooth pieces.
inline double gaussian_line_integral(double mp, double vp, double mq, double vq,
                                     const std::function<double(double)>& f) {
  const double sd = std::sqrt(std::max(vp, vq));
  const double lo = std::min(mp, mq) - 12.0 * sd;
  const double hi = std::max(mp, mq) + 12.0 * sd;
  const int panels = 16;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + (hi - lo) * k / panels;
    const double b = lo + (hi - lo) * (k + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
  }
  return total;
}

/// Central finite-difference gradient of a scalar function of a vector.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x;
    Eigen::VectorXd b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Flattens a composite parameter as (vec, packed upper triangle).
inline Eigen::VectorXd flatten(const CompositeParam& p) {
  const std::size_t m = p.mat ? p.mat->packed().size() : 0;
  Eigen::VectorXd out(p.vec.size() + static_cast<Eigen::Index>(m));
  out.head(p.vec.size()) = p.vec;
  for (std::size_t k = 0; k < m; ++k) out[p.vec.size() + static_cast<Eigen::Index>(k)] = p.mat->packed()[k];
  return out;
}

/// Inverse of flatten, using `shape` for the layout.
inline CompositeParam unflatten(const Eigen::VectorXd& flat, const CompositeParam& shape) {
  CompositeParam p(flat.head(shape.vec.size()));
  if (shape.mat) {
    const std::size_t n = shape.mat->size();
    SymMatrix m(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) m(i, j) = flat[shape.vec.size() + static_cast<Eigen::Index>(k++)];
    }
    p.mat = m;
  }
  return p;
}

/// Gradient of F with respect to the composite inner product <a,b> = a.v b.v + tr(A B).
/// In packed coordinates an off-diagonal entry appears twice in tr(A B), so its
/// partial derivative is twice the matching gradient entry.
inline CompositeParam packed_partials_to_gradient(const Eigen::VectorXd& partials, const CompositeParam& shape) {
  CompositeParam g = unflatten(partials, shape);
  if (g.mat) {
    const std::size_t n = g.mat->size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) (*g.mat)(i, j) *= 0.5;
    }
  }
  return g;
}

}  // namespace brc::testing
