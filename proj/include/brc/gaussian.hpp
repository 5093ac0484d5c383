#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace brc {

/// Multivariate Gaussian in source coordinates (mean, covariance).
struct GaussianParam {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }

  /// Throws DomainError unless the covariance is square, matches the mean,
  /// is symmetric to 1e-12 relative and passes a Cholesky factorization.
  void validate() const;
};

bool is_positive_definite(const Eigen::MatrixXd& m);

/// (m + m^T) / 2
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

/// Inverse of a symmetric positive-definite matrix; throws DomainError otherwise.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m);

/// log det of a symmetric positive-definite matrix; throws DomainError otherwise.
double spd_log_det(const Eigen::MatrixXd& m);

/// Solves m x = b through a symmetric LDL^T factorization. Throws
/// SingularSystemError when a pivot falls below 1e-12 times the largest pivot.
Eigen::MatrixXd symmetric_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b);

}  // namespace brc
