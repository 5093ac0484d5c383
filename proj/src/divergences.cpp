#include "brc/divergences.hpp"

#include <cmath>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

SkewWeight::SkewWeight(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "skew weight must lie in the open interval (0,1), got " << alpha;
    throw DomainError(os.str());
  }
}

double clamp_nonnegative(double value, const char* what) {
  if (std::isnan(value)) throw NonFiniteError(std::string(what) + " evaluated to NaN");
  if (value >= 0.0) return value;
  if (value >= -kNonNegativitySlack) return 0.0;
  std::ostringstream os;
  os << what << " came out negative beyond round-off: " << value;
  throw ConsistencyError(os.str());
}

namespace {

void check_pair(const Generator& g, const CompositeParam& p, const CompositeParam& q, Use use) {
  g.domain().check(p, use, "p");
  g.domain().check(q, use, "q");
}

}  // namespace

double skew_jensen_gap(const Generator& g, const CompositeParam& p, const CompositeParam& q, double a) {
  check_pair(g, p, q, Use::value);
  // a p + (1 - a) p can differ from p in the last bit; the gap is exactly 0 there.
  if (p.vec == q.vec && p.mat == q.mat) return 0.0;
  const CompositeParam m = combine(a, p, 1.0 - a, q);
  g.domain().check(m, Use::value, "skew combination");
  return a * g.eval(p) + (1.0 - a) * g.eval(q) - g.eval(m);
}

double burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q) {
  check_pair(g, p, q, Use::value);
  const CompositeParam m = combine(0.5, p, 0.5, q);
  const double v = 0.5 * g.eval(p) + 0.5 * g.eval(q) - g.eval(m);
  return clamp_nonnegative(v, "Burbea-Rao divergence");
}

double skew_burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q, SkewWeight a) {
  return clamp_nonnegative(skew_jensen_gap(g, p, q, a.value()), "skew Burbea-Rao divergence");
}

double scaled_skew_burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q, double a) {
  if (a == 0.0 || a == 1.0) throw ScaleError("scaled skew Burbea-Rao divergence is undefined at alpha in {0,1}");
  if (!std::isfinite(a)) throw ScaleError("scaled skew Burbea-Rao divergence needs a finite alpha");
  return clamp_nonnegative(skew_jensen_gap(g, p, q, a) / (a * (1.0 - a)), "scaled skew Burbea-Rao divergence");
}

double bregman(const Generator& g, const CompositeParam& p, const CompositeParam& q) {
  g.domain().check(p, Use::value, "p");
  g.domain().check(q, Use::gradient, "q");
  const double v = g.eval(p) - g.eval(q) - inner(p - q, g.grad(q));
  return clamp_nonnegative(v, "Bregman divergence");
}

double jeffreys_bregman(const Generator& g, const CompositeParam& p, const CompositeParam& q) {
  check_pair(g, p, q, Use::gradient);
  const double v = 0.5 * inner(p - q, g.grad(p) - g.grad(q));
  return clamp_nonnegative(v, "Jeffreys-Bregman divergence");
}

double jeffreys_bregman_averaged(const Generator& g, const CompositeParam& p, const CompositeParam& q) {
  check_pair(g, p, q, Use::gradient);
  return 0.5 * (bregman(g, p, q) + bregman(g, q, p));
}

void check_normalized_weights(std::span<const double> weights, bool allow_zero) {
  if (weights.empty()) throw WeightError("weights are empty");
  double total = 0.0;
  bool any_positive = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0 || (!allow_zero && w == 0.0)) {
      std::ostringstream os;
      os << "weights must be " << (allow_zero ? "non-negative" : "positive") << ", got " << w;
      throw WeightError(os.str());
    }
    any_positive = any_positive || w > 0.0;
    total += w;
  }
  if (!any_positive) throw WeightError("all weights are zero");
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "weights must sum to 1, got " << total;
    throw WeightError(os.str());
  }
}

double population_diversity(const Generator& g, std::span<const CompositeParam> points,
                            std::span<const double> weights) {
  if (points.size() != weights.size()) throw WeightError("points and weights differ in length");
  check_normalized_weights(weights);
  double mean_value = 0.0;
  CompositeParam mean = CompositeParam::zeros_like(points.front());
  for (std::size_t i = 0; i < points.size(); ++i) {
    g.domain().check(points[i], Use::value, "population point");
    mean_value += weights[i] * g.eval(points[i]);
    mean += weights[i] * points[i];
  }
  g.domain().check(mean, Use::value, "population mean");
  return clamp_nonnegative(mean_value - g.eval(mean), "population diversity");
}

}  // namespace brc
