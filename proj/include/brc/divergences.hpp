#pragma once

#include <span>

#include "brc/composite_param.hpp"
#include "brc/generator.hpp"

namespace brc {

/// Skew factor restricted to the open interval (0, 1).
class SkewWeight {
 public:
  explicit SkewWeight(double alpha);
  double value() const { return alpha_; }
  /// 1 - alpha, as a SkewWeight.
  SkewWeight complement() const { return SkewWeight(1.0 - alpha_); }

 private:
  double alpha_;
};

/// Round-off allowance for divergences that are non-negative in exact
/// arithmetic. Values in [-slack, 0) are clamped to 0; anything lower raises
/// ConsistencyError.
inline constexpr double kNonNegativitySlack = 1e-12;

double clamp_nonnegative(double value, const char* what);

/// (F(p) + F(q)) / 2 - F((p + q) / 2)
double burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q);

/// a F(p) + (1 - a) F(q) - F(a p + (1 - a) q)
double skew_burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q, SkewWeight a);

/// Skew Jensen gap for any real `a`; no sign clamping. Outside [0, 1] the
/// value is typically negative and the combination may leave the domain.
double skew_jensen_gap(const Generator& g, const CompositeParam& p, const CompositeParam& q, double a);

/// Skew divergence divided by a (1 - a), for any real a outside {0, 1}.
double scaled_skew_burbea_rao(const Generator& g, const CompositeParam& p, const CompositeParam& q, double a);

/// F(p) - F(q) - <p - q, grad F(q)>
double bregman(const Generator& g, const CompositeParam& p, const CompositeParam& q);

/// (B(p, q) + B(q, p)) / 2, computed through the inner-product form
/// <p - q, grad F(p) - grad F(q)> / 2.
double jeffreys_bregman(const Generator& g, const CompositeParam& p, const CompositeParam& q);

/// Same quantity through the averaged Bregman form.
double jeffreys_bregman_averaged(const Generator& g, const CompositeParam& p, const CompositeParam& q);

/// sum w_i F(p_i) - F(sum w_i p_i) for positive weights summing to 1.
double population_diversity(const Generator& g, std::span<const CompositeParam> points,
                            std::span<const double> weights);

/// Validates positive weights normalized to 1 within 1e-9.
void check_normalized_weights(std::span<const double> weights, bool allow_zero = false);

}  // namespace brc
