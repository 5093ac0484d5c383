#include "brc/generator.hpp"

#include <cmath>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

bool Interval::contains(double x, Use use) const {
  const bool closed = closed_for_value && use == Use::value;
  if (lower && (closed ? x < *lower : x <= *lower)) return false;
  if (upper && (closed ? x > *upper : x >= *upper)) return false;
  return true;
}

namespace {

std::string describe(const CompositeParam& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.vec.size(); ++i) os << (i ? ", " : "") << p.vec[i];
  os << ")";
  if (p.mat) os << " with " << p.mat->size() << "x" << p.mat->size() << " matrix part";
  return os.str();
}

}  // namespace

bool Domain::contains(const CompositeParam& p, Use use) const {
  try {
    check(p, use);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

void Domain::check(const CompositeParam& p, Use use, const char* what) const {
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << what << " " << describe(p) << " outside domain [" << description << "]: " << why;
    throw DomainError(os.str());
  };
  if (vec_dim ? static_cast<std::size_t>(p.vec.size()) != *vec_dim : p.vec.size() == 0) {
    fail("wrong vector dimension " + std::to_string(p.vec.size()));
  }
  if (!p.vec.allFinite()) fail("non-finite coordinate");
  for (Eigen::Index i = 0; i < p.vec.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Interval& iv = k < per_coord.size() && per_coord[k] ? *per_coord[k] : all_coords;
    if (!iv.contains(p.vec[i], use)) fail("coordinate " + std::to_string(i) + " out of bounds");
  }
  if (mat_dim) {
    if (!p.mat || p.mat->size() != *mat_dim) fail("matrix part missing or of wrong size");
    if (!p.mat->all_finite()) fail("non-finite matrix entry");
    Eigen::LLT<Eigen::MatrixXd> llt(p.mat->dense());
    if (llt.info() != Eigen::Success) fail("matrix part not positive-definite");
  } else if (p.mat) {
    fail("unexpected matrix part");
  }
}

double Generator::eval(const CompositeParam& x) const {
  domain_.check(x, Use::value);
  return eval_unchecked(x);
}

CompositeParam Generator::grad(const CompositeParam& x) const {
  domain_.check(x, Use::gradient);
  return grad_unchecked(x);
}

CompositeParam Generator::grad_inverse(const CompositeParam& y) const {
  if (!y.all_finite()) throw NonFiniteError(name() + ": non-finite gradient value");
  CompositeParam x = grad_inverse_unchecked(y);
  if (!x.all_finite()) throw NonFiniteError(name() + ": inverse gradient overflowed");
  return x;
}

// ---------------------------------------------------------------- quadratic

QuadraticGenerator::QuadraticGenerator(const Eigen::MatrixXd& q)
    : Generator(Domain{.vec_dim = static_cast<std::size_t>(q.rows()),
                       .description = "R^" + std::to_string(q.rows())}),
      q_(q),
      llt_(q) {
  if (q.rows() == 0 || q.rows() != q.cols()) throw DomainError("quadratic generator needs a square matrix");
  if (!q.isApprox(q.transpose(), 1e-12)) throw DomainError("quadratic generator needs a symmetric matrix");
  if (llt_.info() != Eigen::Success) throw DomainError("quadratic generator needs a positive-definite matrix");
}

double QuadraticGenerator::eval_unchecked(const CompositeParam& x) const {
  return x.vec.dot(q_ * x.vec);
}

CompositeParam QuadraticGenerator::grad_unchecked(const CompositeParam& x) const {
  return CompositeParam(2.0 * (q_ * x.vec));
}

CompositeParam QuadraticGenerator::grad_inverse_unchecked(const CompositeParam& y) const {
  if (y.vec.size() != q_.rows() || y.mat) throw DomainError("quadratic: gradient value has wrong shape");
  return CompositeParam(llt_.solve(0.5 * y.vec));
}

// ---------------------------------------------------------------- shannon

ShannonGenerator::ShannonGenerator(bool extended)
    : Generator(Domain{.all_coords = Interval{.lower = 0.0, .closed_for_value = true},
                       .description = "x_i >= 0 for F, x_i > 0 for grad F"}),
      extended_(extended) {}

double ShannonGenerator::eval_unchecked(const CompositeParam& x) const {
  double s = 0.0;
  for (double v : x.vec) {
    if (v > 0.0) s += v * std::log(v);
    if (extended_) s -= v;
  }
  return s;
}

CompositeParam ShannonGenerator::grad_unchecked(const CompositeParam& x) const {
  Eigen::VectorXd g = x.vec.array().log();
  if (!extended_) g.array() += 1.0;
  return CompositeParam(std::move(g));
}

CompositeParam ShannonGenerator::grad_inverse_unchecked(const CompositeParam& y) const {
  if (y.mat) throw DomainError("xlogx: gradient value has a matrix part");
  Eigen::VectorXd shifted = extended_ ? y.vec : Eigen::VectorXd(y.vec.array() - 1.0);
  return CompositeParam(Eigen::VectorXd(shifted.array().exp()));
}

// ---------------------------------------------------------------- renyi

RenyiGenerator::RenyiGenerator(double order)
    : Generator(Domain{.all_coords = Interval{.lower = 0.0}, .description = "x_i > 0"}), order_(order) {
  if (!(order > 0.0 && order < 1.0)) {
    throw DomainError("renyi generator is convex only for orders in (0,1), got " + std::to_string(order));
  }
}

std::string RenyiGenerator::name() const {
  std::ostringstream os;
  os << "renyi:" << order_;
  return os.str();
}

double RenyiGenerator::eval_unchecked(const CompositeParam& x) const {
  const double s = x.vec.array().pow(order_).sum();
  return -std::log(s) / (1.0 - order_);
}

CompositeParam RenyiGenerator::grad_unchecked(const CompositeParam& x) const {
  const double s = x.vec.array().pow(order_).sum();
  const double c = order_ / (1.0 - order_);
  return CompositeParam(Eigen::VectorXd(-c * x.vec.array().pow(order_ - 1.0) / s));
}

CompositeParam RenyiGenerator::grad_inverse_unchecked(const CompositeParam& y) const {
  if (y.mat) throw DomainError("renyi: gradient value has a matrix part");
  if ((y.vec.array() >= 0.0).any()) throw DomainError("renyi: gradient values must be negative");
  // y_i = -c x_i^(a-1) / S  =>  x_i = (z_i S)^(1/(a-1)), z_i = -y_i / c, S = (sum z_i^(a/(a-1)))^(1-a)
  const double a = order_;
  const double c = a / (1.0 - a);
  const Eigen::ArrayXd z = -y.vec.array() / c;
  const double k = z.pow(a / (a - 1.0)).sum();
  const double s = std::pow(k, 1.0 - a);
  return CompositeParam(Eigen::VectorXd((z * s).pow(1.0 / (a - 1.0))));
}

// ---------------------------------------------------------------- factories

GeneratorPtr make_quadratic(const Eigen::MatrixXd& q) { return std::make_shared<QuadraticGenerator>(q); }

GeneratorPtr make_quadratic_identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return make_quadratic(Eigen::MatrixXd::Identity(n, n));
}

GeneratorPtr make_shannon(bool extended) { return std::make_shared<ShannonGenerator>(extended); }

GeneratorPtr make_renyi(double order) { return std::make_shared<RenyiGenerator>(order); }

GeneratorPtr generator_by_name(const std::string& name, std::size_t dim) {
  if (name == "quadratic") return make_quadratic_identity(dim);
  if (name == "xlogx") return make_shannon(false);
  if (name == "xlogx-x") return make_shannon(true);
  if (name.rfind("renyi:", 0) == 0) {
    const std::string order = name.substr(6);
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(order, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != order.size()) throw DomainError("bad renyi order '" + order + "'");
    return make_renyi(a);
  }
  throw DomainError("unknown generator '" + name + "'");
}

}  // namespace brc
