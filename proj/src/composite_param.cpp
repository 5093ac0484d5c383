#include "brc/composite_param.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix part must be square, got " << m.rows() << "x" << m.cols();
    throw DomainError(os.str());
  }
  const auto n = static_cast<std::size_t>(m.rows());
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 0.0);
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double a = m(i, j);
      const double b = m(j, i);
      if (std::abs(a - b) > rel_tol * scale) {
        std::ostringstream os;
        os << "matrix part is not symmetric at (" << i << "," << j << "): " << a << " vs " << b;
        throw DomainError(os.str());
      }
      out(i, j) = 0.5 * (a + b);
    }
  }
  return out;
}

SymMatrix SymMatrix::identity(std::size_t n, double scale) {
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = scale;
  return out;
}

Eigen::MatrixXd SymMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      m(i, j) = m(j, i) = (*this)(i, j);
    }
  }
  return m;
}

double SymMatrix::frobenius(const SymMatrix& o) const {
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    diag += (*this)(i, i) * o(i, i);
    for (std::size_t j = i + 1; j < n_; ++j) off += (*this)(i, j) * o(i, j);
  }
  return diag + 2.0 * off;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool SymMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

CompositeParam CompositeParam::from(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return CompositeParam(std::move(v));
}

CompositeParam CompositeParam::zeros_like(const CompositeParam& shape) {
  CompositeParam out(Eigen::VectorXd::Zero(shape.vec.size()));
  if (shape.mat) out.mat = SymMatrix(shape.mat->size());
  return out;
}

bool CompositeParam::same_shape(const CompositeParam& o) const {
  if (vec.size() != o.vec.size()) return false;
  if (mat.has_value() != o.mat.has_value()) return false;
  return !mat || mat->size() == o.mat->size();
}

double CompositeParam::max_abs() const {
  double m = vec.size() > 0 ? vec.cwiseAbs().maxCoeff() : 0.0;
  if (mat) m = std::max(m, mat->max_abs());
  return m;
}

bool CompositeParam::all_finite() const {
  return vec.allFinite() && (!mat || mat->all_finite());
}

namespace {

void require_same_shape(const CompositeParam& a, const CompositeParam& b) {
  if (!a.same_shape(b)) throw DomainError("parameter shapes differ");
}

}  // namespace

CompositeParam& CompositeParam::operator+=(const CompositeParam& o) {
  require_same_shape(*this, o);
  vec += o.vec;
  if (mat) *mat += *o.mat;
  return *this;
}

CompositeParam& CompositeParam::operator-=(const CompositeParam& o) {
  require_same_shape(*this, o);
  vec -= o.vec;
  if (mat) *mat -= *o.mat;
  return *this;
}

CompositeParam& CompositeParam::operator*=(double s) {
  vec *= s;
  if (mat) *mat *= s;
  return *this;
}

double inner(const CompositeParam& a, const CompositeParam& b) {
  require_same_shape(a, b);
  double r = a.vec.dot(b.vec);
  if (a.mat) r += a.mat->frobenius(*b.mat);
  return r;
}

CompositeParam combine(double a, const CompositeParam& p, double b, const CompositeParam& q) {
  require_same_shape(p, q);
  CompositeParam out(a * p.vec + b * q.vec);
  if (p.mat) {
    SymMatrix m(p.mat->size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i; j < m.size(); ++j) m(i, j) = a * (*p.mat)(i, j) + b * (*q.mat)(i, j);
    }
    out.mat = std::move(m);
  }
  return out;
}

double relative_change(const CompositeParam& next, const CompositeParam& reference) {
  const double step = (next - reference).max_abs();
  if (step == 0.0) return 0.0;
  const double scale = reference.max_abs();
  return scale > 0.0 ? step / scale : step;
}

}  // namespace brc
