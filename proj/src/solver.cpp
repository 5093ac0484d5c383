#include "brc/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

WeightedSet::WeightedSet(std::vector<CompositeParam> points, std::vector<double> weights, std::vector<double> skews)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw WeightError("weighted set needs at least one point");
  if (weights_.size() != points_.size()) throw WeightError("weights and points differ in length");
  for (const auto& p : points_) {
    if (!p.same_shape(points_.front())) throw DomainError("weighted set points differ in shape");
  }
  check_normalized_weights(weights_, /*allow_zero=*/true);
  if (skews.empty()) skews.assign(points_.size(), 0.5);
  if (skews.size() != points_.size()) throw WeightError("skews and points differ in length");
  skews_.reserve(skews.size());
  for (double a : skews) skews_.emplace_back(a);
}

WeightedSet WeightedSet::uniform(std::vector<CompositeParam> points, double skew) {
  const std::size_t n = points.size();
  if (n == 0) throw WeightError("weighted set needs at least one point");
  return WeightedSet(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                     std::vector<double>(n, skew));
}

WeightedSet WeightedSet::with_uniform_skew(SkewWeight alpha) const {
  return WeightedSet(points_, weights_, std::vector<double>(points_.size(), alpha.value()));
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iterations < 1) throw DomainError("solver max_iterations must be at least 1");
}

double energy(const Generator& g, const WeightedSet& s, const CompositeParam& c) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights()[i] == 0.0) continue;
    e += s.weights()[i] * skew_burbea_rao(g, c, s.points()[i], s.skews()[i]);
  }
  return clamp_nonnegative(e, "centroid energy");
}

namespace {

CompositeParam dual_target(const Generator& g, const WeightedSet& s, const CompositeParam& c) {
  CompositeParam acc = CompositeParam::zeros_like(c);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.weights()[i];
    if (w == 0.0) continue;
    const double a = s.skews()[i].value();
    const CompositeParam m = combine(a, c, 1.0 - a, s.points()[i]);
    g.domain().check(m, Use::gradient, "skew combination");
    acc += (w * a) * g.grad(m);
    total += w * a;
  }
  acc *= 1.0 / total;
  if (!acc.all_finite()) throw NonFiniteError(g.name() + ": gradient average is not finite");
  return acc;
}

CompositeParam primal_from_dual(const Generator& g, const CompositeParam& y) {
  CompositeParam x = g.grad_inverse(y);
  g.domain().check(x, Use::gradient, "updated centroid");
  return x;
}

std::size_t positive_weight_count(const WeightedSet& s) {
  std::size_t k = 0;
  for (double w : s.weights()) k += w > 0.0 ? 1 : 0;
  return k;
}

}  // namespace

CompositeParam cccp_step(const Generator& g, const WeightedSet& s, const CompositeParam& c) {
  g.domain().check(c, Use::gradient, "centroid");
  return primal_from_dual(g, dual_target(g, s, c));
}

CompositeParam bregman_right_centroid(const WeightedSet& s) {
  CompositeParam acc = CompositeParam::zeros_like(s.points().front());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights()[i] > 0.0) acc += s.weights()[i] * s.points()[i];
  }
  return acc;
}

CompositeParam bregman_left_centroid(const Generator& g, const WeightedSet& s) {
  CompositeParam acc = CompositeParam::zeros_like(s.points().front());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights()[i] > 0.0) acc += s.weights()[i] * g.grad(s.points()[i]);
  }
  return g.grad_inverse(acc);
}

CentroidResult solve_centroid(const Generator& g, const WeightedSet& s, const SolverConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights()[i] > 0.0) g.domain().check(s.points()[i], Use::value, "input point");
  }

  CentroidResult out;
  if (positive_weight_count(s) == 1) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.weights()[i] > 0.0) out.centroid = s.points()[i];
    }
    out.report.energy_trace = {0.0};
    out.report.converged = true;
    return out;
  }

  CompositeParam c = cfg.init ? *cfg.init : bregman_right_centroid(s);
  g.domain().check(c, Use::gradient, "initial centroid");
  SolverReport& report = out.report;
  report.energy_trace.push_back(energy(g, s, c));
  double previous_step = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    CompositeParam target = dual_target(g, s, c);
    std::optional<CompositeParam> next;
    std::optional<CompositeParam> anchor;
    for (int halvings = 0; !next; ++halvings) {
      try {
        next = primal_from_dual(g, target);
      } catch (const DomainError& e) {
        if (halvings == 20) throw NonFiniteError(std::string("CCCP update left the domain: ") + e.what());
      } catch (const NonFiniteError& e) {
        if (halvings == 20) throw;
      }
      if (!next) {
        if (!anchor) anchor = g.grad(c);
        target = combine(0.5, target, 0.5, *anchor);
      }
    }

    const double e = energy(g, s, *next);
    const double step = relative_change(*next, c);
    const double e_change = std::abs(e - report.energy_trace.back());
    report.energy_trace.push_back(e);
    report.iterations = t;
    report.final_relative_step = step;
    c = std::move(*next);

    if (step < cfg.tolerance || (e_change <= 1e-14 && step >= previous_step)) {
      report.converged = true;
      break;
    }
    previous_step = step;
  }
  out.centroid = std::move(c);
  return out;
}

std::vector<CentroidResult> skew_orbit(const Generator& g, const WeightedSet& s, std::span<const double> alphas,
                                       const SolverConfig& cfg) {
  std::vector<CentroidResult> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(solve_centroid(g, s.with_uniform_skew(SkewWeight(a)), cfg));
  return out;
}

double quasi_arithmetic_mean(const std::function<double(double)>& f, const std::function<double(double)>& f_inverse,
                             std::span<const double> xs, std::span<const double> ws) {
  if (xs.size() != ws.size()) throw WeightError("values and weights differ in length");
  check_normalized_weights(ws);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * f(xs[i]);
  const double m = f_inverse(acc);
  if (!std::isfinite(m)) throw NonFiniteError("quasi-arithmetic mean is not finite");
  return m;
}

}  // namespace brc
