#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "brc/composite_param.hpp"

namespace brc {

/// What a point is about to be used for. Some generators accept boundary
/// points for evaluation (0 log 0 = 0) but not where the gradient is needed.
enum class Use { value, gradient };

/// Bounds on a single vector coordinate.
struct Interval {
  std::optional<double> lower;
  std::optional<double> upper;
  /// Boundary points are admitted when only F is evaluated.
  bool closed_for_value = false;

  bool contains(double x, Use use) const;
};

/// Declarative domain: fixed shape, per-coordinate box, optional PD matrix part.
struct Domain {
  std::optional<std::size_t> vec_dim;  // unset: any dimension >= 1
  std::optional<std::size_t> mat_dim;  // set: a positive-definite matrix part is required
  Interval all_coords;                 // applied to every vector coordinate
  std::vector<std::optional<Interval>> per_coord;  // overrides all_coords where set
  std::string description;

  /// Throws DomainError naming `what` if the point is not admissible.
  void check(const CompositeParam& p, Use use, const char* what = "point") const;
  bool contains(const CompositeParam& p, Use use) const;
};

/// A strictly convex, differentiable function F with gradient and inverse gradient.
///
/// The public entry points validate their input against the declared domain;
/// derived classes implement the unchecked math.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::string name() const = 0;
  const Domain& domain() const { return domain_; }

  double eval(const CompositeParam& x) const;
  CompositeParam grad(const CompositeParam& x) const;
  /// Inverse of the gradient map. Throws DomainError if `y` is not in the
  /// gradient image and NonFiniteError if the result overflows.
  CompositeParam grad_inverse(const CompositeParam& y) const;

 protected:
  explicit Generator(Domain d) : domain_(std::move(d)) {}

  virtual double eval_unchecked(const CompositeParam& x) const = 0;
  virtual CompositeParam grad_unchecked(const CompositeParam& x) const = 0;
  virtual CompositeParam grad_inverse_unchecked(const CompositeParam& y) const = 0;

 private:
  Domain domain_;
};

using GeneratorPtr = std::shared_ptr<const Generator>;

/// F(x) = <Qx, x> with Q symmetric positive-definite.
class QuadraticGenerator final : public Generator {
 public:
  explicit QuadraticGenerator(const Eigen::MatrixXd& q);
  std::string name() const override { return "quadratic"; }
  const Eigen::MatrixXd& matrix() const { return q_; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override;

 private:
  Eigen::MatrixXd q_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Negative Shannon entropy F(x) = sum x_i log x_i, or with `extended` the
/// form sum x_i log x_i - x_i whose Bregman divergence is the generalized KL.
class ShannonGenerator final : public Generator {
 public:
  explicit ShannonGenerator(bool extended = false);
  std::string name() const override { return extended_ ? "xlogx-x" : "xlogx"; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override;

 private:
  bool extended_;
};

/// Negative Renyi entropy F(x) = -(1/(1-a)) log sum x_i^a on the positive
/// orthant. Strictly convex for orders a in (0, 1).
class RenyiGenerator final : public Generator {
 public:
  explicit RenyiGenerator(double order);
  std::string name() const override;
  double order() const { return order_; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_unchecked(const CompositeParam& x) const override;
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override;

 private:
  double order_;
};

GeneratorPtr make_quadratic(const Eigen::MatrixXd& q);
GeneratorPtr make_quadratic_identity(std::size_t dim);
GeneratorPtr make_shannon(bool extended = false);
GeneratorPtr make_renyi(double order);

/// Looks up a shipped generator by CLI name: "quadratic", "xlogx", "xlogx-x",
/// "renyi:<order>". `dim` sizes the quadratic generator (Q = I).
GeneratorPtr generator_by_name(const std::string& name, std::size_t dim);

}  // namespace brc
