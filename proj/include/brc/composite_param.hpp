#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace brc {

/// Symmetric matrix stored as its packed upper triangle (row-major).
///
/// Construction from a dense matrix validates symmetry to 1e-12 relative to
/// the largest entry and averages the two triangles; arithmetic is done
/// directly on the packed storage so symmetry cannot drift.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

  static SymMatrix from_dense(const Eigen::MatrixXd& m, double rel_tol = 1e-12);
  static SymMatrix identity(std::size_t n, double scale = 1.0);

  std::size_t size() const { return n_; }
  std::span<const double> packed() const { return data_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  Eigen::MatrixXd dense() const;

  /// tr(A^T B), the Frobenius inner product.
  double frobenius(const SymMatrix& other) const;
  double max_abs() const;
  bool all_finite() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - (i * (i - 1)) / 2 + (j - i);
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// A point in parameter space: a vector part plus an optional symmetric
/// matrix part. The inner product is the sum of the dot product on the vector
/// parts and the Frobenius product on the matrix parts.
struct CompositeParam {
  Eigen::VectorXd vec;
  std::optional<SymMatrix> mat;

  CompositeParam() = default;
  explicit CompositeParam(Eigen::VectorXd v) : vec(std::move(v)) {}
  CompositeParam(Eigen::VectorXd v, SymMatrix m) : vec(std::move(v)), mat(std::move(m)) {}

  static CompositeParam scalar(double x) { return CompositeParam(Eigen::VectorXd::Constant(1, x)); }
  static CompositeParam from(std::initializer_list<double> xs);
  static CompositeParam zeros_like(const CompositeParam& shape);

  bool same_shape(const CompositeParam& o) const;
  double max_abs() const;
  bool all_finite() const;

  CompositeParam& operator+=(const CompositeParam& o);
  CompositeParam& operator-=(const CompositeParam& o);
  CompositeParam& operator*=(double s);

  friend CompositeParam operator+(CompositeParam a, const CompositeParam& b) { return a += b; }
  friend CompositeParam operator-(CompositeParam a, const CompositeParam& b) { return a -= b; }
  friend CompositeParam operator*(double s, CompositeParam a) { return a *= s; }
};

double inner(const CompositeParam& a, const CompositeParam& b);

/// a*p + b*q
CompositeParam combine(double a, const CompositeParam& p, double b, const CompositeParam& q);

/// Max-norm of the difference, relative to the max-norm of `reference`.
double relative_change(const CompositeParam& next, const CompositeParam& reference);

}  // namespace brc
