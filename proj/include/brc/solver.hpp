#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "brc/composite_param.hpp"
#include "brc/divergences.hpp"
#include "brc/generator.hpp"

namespace brc {

/// Weighted points with per-point skew factors. Zero weights are allowed and
/// the corresponding points are ignored; at least one weight must be positive.
class WeightedSet {
 public:
  /// Skews default to 1/2 for every point when `skews` is empty.
  WeightedSet(std::vector<CompositeParam> points, std::vector<double> weights, std::vector<double> skews = {});

  /// Equal weights 1/n.
  static WeightedSet uniform(std::vector<CompositeParam> points, double skew = 0.5);

  std::size_t size() const { return points_.size(); }
  const std::vector<CompositeParam>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SkewWeight>& skews() const { return skews_; }

  /// A copy with every skew set to `alpha`.
  WeightedSet with_uniform_skew(SkewWeight alpha) const;

 private:
  std::vector<CompositeParam> points_;
  std::vector<double> weights_;
  std::vector<SkewWeight> skews_;
};

struct SolverConfig {
  double tolerance = 1e-10;
  int max_iterations = 200;
  /// Starting point; the weighted arithmetic mean of the points when unset.
  std::optional<CompositeParam> init;

  void validate() const;
};

struct SolverReport {
  int iterations = 0;
  /// Energy at the starting point followed by one entry per iteration.
  std::vector<double> energy_trace;
  bool converged = false;
  double final_relative_step = 0.0;
};

struct CentroidResult {
  CompositeParam centroid;
  SolverReport report;
};

/// sum_i w_i BR^(a_i)(c, p_i)
double energy(const Generator& g, const WeightedSet& s, const CompositeParam& c);

/// One CCCP update:
/// grad F(c') = sum_i w_i a_i grad F(a_i c + (1 - a_i) p_i) / sum_i w_i a_i.
CompositeParam cccp_step(const Generator& g, const WeightedSet& s, const CompositeParam& c);

/// Iterates cccp_step to the skew Burbea-Rao centroid.
///
/// Stops when the max-norm change of the iterate relative to its size drops
/// below cfg.tolerance, or when the energy changes by at most 1e-14 while the
/// step has stopped shrinking (round-off floor). If an update leaves the
/// domain, the dual target is halved toward grad F of the current iterate up
/// to 20 times before NonFiniteError is raised.
CentroidResult solve_centroid(const Generator& g, const WeightedSet& s, const SolverConfig& cfg = {});

/// Center of mass sum_i w_i p_i.
CompositeParam bregman_right_centroid(const WeightedSet& s);

/// grad F^-1(sum_i w_i grad F(p_i)).
CompositeParam bregman_left_centroid(const Generator& g, const WeightedSet& s);

/// Solves the centroid with uniform skew alpha for each entry of `alphas`.
std::vector<CentroidResult> skew_orbit(const Generator& g, const WeightedSet& s, std::span<const double> alphas,
                                       const SolverConfig& cfg = {});

/// f^-1(sum_i w_i f(x_i)) for a strictly monotone f.
double quasi_arithmetic_mean(const std::function<double(double)>& f, const std::function<double(double)>& f_inverse,
                             std::span<const double> xs, std::span<const double> ws);

}  // namespace brc
