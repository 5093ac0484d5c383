#include "brc/gaussian.hpp"

#include <cmath>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

bool is_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

void GaussianParam::validate() const {
  if (mean.size() == 0) throw DomainError("gaussian: empty mean");
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    std::ostringstream os;
    os << "gaussian: covariance is " << cov.rows() << "x" << cov.cols() << " but mean has dimension " << mean.size();
    throw DomainError(os.str());
  }
  if (!mean.allFinite() || !cov.allFinite()) throw DomainError("gaussian: non-finite parameter");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("gaussian: covariance is not symmetric");
  }
  if (!is_positive_definite(cov)) throw DomainError("gaussian: covariance is not positive-definite");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive-definite");
  const auto n = m.rows();
  return symmetrized(llt.solve(Eigen::MatrixXd::Identity(n, n)));
}

double spd_log_det(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive-definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd symmetric_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || pivots.size() == 0 || !pivots.allFinite() ||
      pivots.minCoeff() <= 1e-12 * pivots.maxCoeff()) {
    throw SingularSystemError("symmetric system is singular to working precision");
  }
  return ldlt.solve(b);
}

}  // namespace brc
