#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brc/gaussian.hpp"
#include "brc/solver.hpp"

namespace brc {

/// Weighted mixture of multivariate Gaussians of a common dimension.
struct MixtureModel {
  std::size_t dim = 0;
  std::vector<double> weights;
  std::vector<GaussianParam> components;

  std::size_t size() const { return components.size(); }
  /// Throws DomainError/WeightError if the invariants do not hold.
  void validate() const;
};

/// n points of dimension d, one per row.
struct PointCloud {
  Eigen::MatrixXd rows;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
  void validate() const;
};

/// Hard-assignment k-means (k-means++ seeding) followed by per-cluster moment
/// fits. Covariances whose smallest eigenvalue is below eps = 1e-6 trace / d
/// get eps I added.
/// A cluster with fewer than d + 1 points is reseeded once, then
/// DegenerateClusterError is raised.
MixtureModel fit_mixture(const PointCloud& pc, std::size_t k, std::uint64_t seed, const SolverConfig& cfg = {});

struct KMeansResult {
  MixtureModel model;
  std::vector<std::size_t> assignment;
  /// Total within-cluster Bhattacharyya energy after each Lloyd iteration.
  std::vector<double> energy_trace;
  int iterations = 0;
};

/// Lloyd iterations over mixture components under the Bhattacharyya distance,
/// with centers recomputed as generic Bhattacharyya centroids.
KMeansResult kmeans_bhattacharyya(std::span<const GaussianParam> components, std::span<const double> weights,
                                  std::size_t k, std::uint64_t seed, const SolverConfig& cfg = {});

struct SimplifyResult {
  MixtureModel model;
  /// Input component indices merged into each output component.
  std::vector<std::vector<std::size_t>> members;
};

/// Greedy agglomeration: repeatedly replace the closest pair (Bhattacharyya
/// distance) by its weighted Bhattacharyya centroid until k_target remain.
SimplifyResult hierarchical_simplify(const MixtureModel& m, std::size_t k_target, const SolverConfig& cfg = {});

/// Index of the component with the largest weighted log-density, per point.
std::vector<std::size_t> assign_points(const MixtureModel& m, const PointCloud& pc);

struct GaussianSet {
  std::vector<GaussianParam> components;
  std::vector<double> weights;
};

enum class Winner { tie, generic, tailored };
std::string to_string(Winner w);

struct ComparisonRow {
  std::size_t instance_id = 0;
  double energy_generic = 0.0;
  double energy_tailored = 0.0;
  Winner winner = Winner::tie;
  /// Iterations until the energy is within 1% of the better final energy.
  int iters_generic = 0;
  int iters_tailored = 0;
  bool generic_correct = false;
  bool tailored_correct = false;
  std::string failure;  // empty when both solvers ran cleanly
};

struct ComparisonSummary {
  std::size_t instances = 0;
  double generic_correct_fraction = 0.0;
  double tailored_correct_fraction = 0.0;
  double mean_iters_generic = 0.0;
  double mean_iters_tailored = 0.0;
  std::size_t generic_beaten = 0;   // tailored lower by more than 1%
  std::size_t tailored_beaten = 0;  // generic lower by more than 1%
  std::size_t failures = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  ComparisonSummary summary;
};

/// Runs the generic CCCP and tailored solvers on every instance and scores
/// them with the 1% rule. Per-instance failures are recorded, never thrown.
ComparisonReport compare_solvers(std::span<const GaussianSet> instances, const SolverConfig& cfg = {});

/// Random weighted Gaussian sets: means ~ N(0, I), covariances A A^T / d + 0.05 I
/// with A standard normal, weights from normalized exponentials.
std::vector<GaussianSet> random_gaussian_sets(std::size_t count, std::size_t dim, std::size_t components,
                                              std::uint64_t seed);

}  // namespace brc
