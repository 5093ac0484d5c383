#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brc/gaussian.hpp"
#include "brc/solver.hpp"

namespace brc {

struct TailoredReport {
  int iterations = 0;
  /// Energy at the starting point followed by one entry per outer iteration.
  std::vector<double> energy_trace;
  bool converged = false;
  /// Set when the iteration stopped on a non-PD or singular update.
  std::optional<std::string> failure;
  /// Energy reached by the generic CCCP solver on the same input.
  double generic_energy = 0.0;
  /// Final energy no more than 1% above the generic solver's.
  bool within_one_percent_of_generic = false;
};

struct TailoredResult {
  GaussianParam centroid;
  TailoredReport report;
};

struct GaussianCentroidResult {
  GaussianParam centroid;
  SolverReport report;
};

/// sum_i w_i B(c, g_i) with B the Bhattacharyya distance between Gaussians.
double bhattacharyya_energy(std::span<const GaussianParam> gs, std::span<const double> ws, const GaussianParam& c);

/// Mean update: [sum w_i (U_i + U_i^T)]^-1 sum w_i (U_i + U_i^T) mu_i with U_i = (Sigma_c + Sigma_i)^-1.
Eigen::VectorXd update_mean(std::span<const GaussianParam> gs, std::span<const double> ws, const GaussianParam& c);

/// Covariance update Sigma = 2W [B + diag(B)]^-1 where
/// A = sum w_i (2 U_i^T - U_i^T d_i d_i^T U_i^T), d_i = mu_c - mu_i,
/// B = A + A^T - diag(A) and W = sum w_i.
/// Throws NotPDError when the result is not positive-definite.
Eigen::MatrixXd update_covariance(std::span<const GaussianParam> gs, std::span<const double> ws,
                                  const GaussianParam& c);

/// Alternates update_mean and update_covariance from the generic solver's
/// starting point. Non-PD or singular updates end the run with
/// converged = false and the last valid iterate.
TailoredResult solve_tailored(std::span<const GaussianParam> gs, std::span<const double> ws,
                              const SolverConfig& cfg = {});

/// Bhattacharyya centroid through the generic CCCP solver on natural parameters.
GaussianCentroidResult solve_generic_gaussian(std::span<const GaussianParam> gs, std::span<const double> ws,
                                              const SolverConfig& cfg = {});

/// Natural parameters (Sigma^-1 mu, Sigma^-1 / 2) and back.
CompositeParam gaussian_to_natural(const GaussianParam& g);
GaussianParam gaussian_from_natural(const CompositeParam& theta);

}  // namespace brc
