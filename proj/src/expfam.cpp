#include "brc/expfam.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

namespace {

template <class T>
const T& expect(const SourceParam& s, const char* family) {
  const T* p = std::get_if<T>(&s);
  if (p == nullptr) throw DomainError(std::string("source parameter does not belong to the ") + family + " family");
  return *p;
}

// ---------------------------------------------------------------- log-normalizers

/// F(theta) = exp(theta)
class PoissonLogNormalizer final : public Generator {
 public:
  PoissonLogNormalizer() : Generator(Domain{.vec_dim = 1, .description = "theta in R"}) {}
  std::string name() const override { return "poisson"; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override { return std::exp(x.vec[0]); }
  CompositeParam grad_unchecked(const CompositeParam& x) const override {
    return CompositeParam::scalar(std::exp(x.vec[0]));
  }
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override {
    if (y.vec.size() != 1 || y.mat || !(y.vec[0] > 0.0)) throw DomainError("poisson: mean parameter must be > 0");
    return CompositeParam::scalar(std::log(y.vec[0]));
  }
};

/// F(theta) = log(1 + sum exp theta_i), evaluated with log-sum-exp.
class MultinomialLogNormalizer final : public Generator {
 public:
  explicit MultinomialLogNormalizer(std::size_t outcomes)
      : Generator(Domain{.vec_dim = outcomes - 1, .description = "theta in R^(d-1)"}) {}
  std::string name() const override { return "multinomial"; }

  static double log_partition(const Eigen::VectorXd& theta) {
    const double m = std::max(0.0, theta.maxCoeff());
    return m + std::log(std::exp(-m) + (theta.array() - m).exp().sum());
  }

 protected:
  double eval_unchecked(const CompositeParam& x) const override { return log_partition(x.vec); }
  CompositeParam grad_unchecked(const CompositeParam& x) const override {
    const double f = log_partition(x.vec);
    return CompositeParam(Eigen::VectorXd((x.vec.array() - f).exp()));
  }
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override {
    if (static_cast<std::size_t>(y.vec.size()) != *domain().vec_dim || y.mat) throw DomainError("multinomial: mean parameter has wrong shape");
    const double s = y.vec.sum();
    if ((y.vec.array() <= 0.0).any() || !(s < 1.0)) {
      throw DomainError("multinomial: mean parameters must be positive with sum below 1");
    }
    return CompositeParam(Eigen::VectorXd(y.vec.array().log() - std::log1p(-s)));
  }
};

/// F(theta) = -theta_1^2 / (4 theta_2) + log(-pi / theta_2) / 2, theta_2 < 0.
class UnivariateGaussianLogNormalizer final : public Generator {
 public:
  UnivariateGaussianLogNormalizer()
      : Generator(Domain{.vec_dim = 2,
                         .per_coord = {std::nullopt, Interval{.upper = 0.0}},
                         .description = "theta_1 in R, theta_2 < 0"}) {}
  std::string name() const override { return "ugaussian"; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override {
    const double t1 = x.vec[0];
    const double t2 = x.vec[1];
    return -t1 * t1 / (4.0 * t2) + 0.5 * std::log(-std::numbers::pi / t2);
  }
  CompositeParam grad_unchecked(const CompositeParam& x) const override {
    const double t1 = x.vec[0];
    const double t2 = x.vec[1];
    const double mean = -t1 / (2.0 * t2);
    const double var = -1.0 / (2.0 * t2);
    return CompositeParam::from({mean, mean * mean + var});
  }
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override {
    if (y.vec.size() != 2 || y.mat) throw DomainError("ugaussian: mean parameter has wrong shape");
    const double mean = y.vec[0];
    const double var = y.vec[1] - mean * mean;
    if (!(var > 0.0)) throw DomainError("ugaussian: mean parameter implies non-positive variance");
    return CompositeParam::from({mean / var, -0.5 / var});
  }
};

/// F(theta) = tr(theta_2^-1 theta_1 theta_1^T) / 4 - log det theta_2 / 2 + d log(pi) / 2.
class GaussianLogNormalizer final : public Generator {
 public:
  explicit GaussianLogNormalizer(std::size_t dim)
      : Generator(Domain{.vec_dim = dim, .mat_dim = dim, .description = "theta_1 in R^d, theta_2 positive-definite"}),
        dim_(dim) {}
  std::string name() const override { return "mvgaussian"; }

 protected:
  double eval_unchecked(const CompositeParam& x) const override {
    Eigen::LLT<Eigen::MatrixXd> llt(x.mat->dense());
    const double quad = x.vec.dot(llt.solve(x.vec));
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return 0.25 * quad - 0.5 * log_det + 0.5 * static_cast<double>(dim_) * std::log(std::numbers::pi);
  }
  CompositeParam grad_unchecked(const CompositeParam& x) const override {
    const Eigen::MatrixXd cov = 0.5 * spd_inverse(x.mat->dense());
    const Eigen::VectorXd mean = cov * x.vec;
    return CompositeParam(mean, SymMatrix::from_dense(symmetrized(-(cov + mean * mean.transpose()))));
  }
  CompositeParam grad_inverse_unchecked(const CompositeParam& y) const override {
    if (static_cast<std::size_t>(y.vec.size()) != dim_ || !y.mat || y.mat->size() != dim_) {
      throw DomainError("mvgaussian: mean parameter has wrong shape");
    }
    const Eigen::MatrixXd cov = symmetrized(-y.mat->dense() - y.vec * y.vec.transpose());
    if (!is_positive_definite(cov)) throw DomainError("mvgaussian: mean parameter implies a non-PD covariance");
    const Eigen::MatrixXd prec = spd_inverse(cov);
    return CompositeParam(prec * y.vec, SymMatrix::from_dense(0.5 * prec));
  }

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------- families

class PoissonFamily final : public ExpFamily {
 public:
  PoissonFamily() : ExpFamily(poisson_log_normalizer()) {}
  std::string name() const override { return "poisson"; }
  Support support() const override { return {true, 1}; }

  void validate(const SourceParam& s) const override {
    const auto& p = expect<PoissonParam>(s, "poisson");
    if (!(p.rate > 0.0) || !std::isfinite(p.rate)) throw DomainError("poisson: rate must be positive and finite");
  }
  CompositeParam to_natural(const SourceParam& s) const override {
    validate(s);
    return CompositeParam::scalar(std::log(std::get<PoissonParam>(s).rate));
  }
  SourceParam to_source(const CompositeParam& theta) const override {
    log_normalizer().domain().check(theta, Use::value, "natural parameter");
    return PoissonParam{std::exp(theta.vec[0])};
  }
  CompositeParam sufficient_statistic(const Eigen::VectorXd& x) const override {
    return CompositeParam::scalar(count(x));
  }
  double carrier(const Eigen::VectorXd& x) const override { return -std::lgamma(count(x) + 1.0); }

  double bhattacharyya_source_formula(const SourceParam& p, const SourceParam& q) const override {
    validate(p);
    validate(q);
    const double d = std::sqrt(std::get<PoissonParam>(p).rate) - std::sqrt(std::get<PoissonParam>(q).rate);
    return 0.5 * d * d;
  }

 private:
  static double count(const Eigen::VectorXd& x) {
    if (x.size() != 1 || !(x[0] >= 0.0) || x[0] != std::floor(x[0])) {
      throw DomainError("poisson: observation must be a non-negative integer");
    }
    return x[0];
  }
};

class MultinomialFamily final : public ExpFamily {
 public:
  explicit MultinomialFamily(std::size_t outcomes)
      : ExpFamily(multinomial_log_normalizer(outcomes)), outcomes_(outcomes) {}
  std::string name() const override { return "multinomial"; }
  Support support() const override { return {true, 1}; }

  void validate(const SourceParam& s) const override {
    const auto& p = expect<MultinomialParam>(s, "multinomial");
    if (static_cast<std::size_t>(p.probs.size()) != outcomes_) {
      throw DomainError("multinomial: expected " + std::to_string(outcomes_) + " probabilities");
    }
    if (!p.probs.allFinite() || (p.probs.array() <= 0.0).any()) {
      throw DomainError("multinomial: probabilities must lie in the open simplex");
    }
    if (std::abs(p.probs.sum() - 1.0) > 1e-9) throw DomainError("multinomial: probabilities must sum to 1");
  }
  CompositeParam to_natural(const SourceParam& s) const override {
    validate(s);
    const Eigen::VectorXd& p = std::get<MultinomialParam>(s).probs;
    const auto k = static_cast<Eigen::Index>(outcomes_ - 1);
    return CompositeParam(Eigen::VectorXd(p.head(k).array().log() - std::log(p[k])));
  }
  SourceParam to_source(const CompositeParam& theta) const override {
    log_normalizer().domain().check(theta, Use::value, "natural parameter");
    const double f = MultinomialLogNormalizer::log_partition(theta.vec);
    Eigen::VectorXd p(static_cast<Eigen::Index>(outcomes_));
    p.head(theta.vec.size()) = (theta.vec.array() - f).exp();
    p[theta.vec.size()] = std::exp(-f);
    return MultinomialParam{p};
  }
  CompositeParam sufficient_statistic(const Eigen::VectorXd& x) const override {
    const auto k = outcome(x);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outcomes_ - 1));
    if (k + 1 < outcomes_) t[static_cast<Eigen::Index>(k)] = 1.0;
    return CompositeParam(std::move(t));
  }
  double carrier(const Eigen::VectorXd& x) const override {
    outcome(x);
    return 0.0;
  }

  double bhattacharyya_source_formula(const SourceParam& p, const SourceParam& q) const override {
    validate(p);
    validate(q);
    const auto& a = std::get<MultinomialParam>(p).probs;
    const auto& b = std::get<MultinomialParam>(q).probs;
    return -std::log((a.array() * b.array()).sqrt().sum());
  }

 private:
  std::size_t outcome(const Eigen::VectorXd& x) const {
    if (x.size() != 1 || !(x[0] >= 0.0) || x[0] != std::floor(x[0]) || x[0] >= static_cast<double>(outcomes_)) {
      throw DomainError("multinomial: observation must be an outcome index in [0, d)");
    }
    return static_cast<std::size_t>(x[0]);
  }

  std::size_t outcomes_;
};

class UnivariateGaussianFamily final : public ExpFamily {
 public:
  UnivariateGaussianFamily() : ExpFamily(univariate_gaussian_log_normalizer()) {}
  std::string name() const override { return "ugaussian"; }
  Support support() const override { return {false, 1}; }

  void validate(const SourceParam& s) const override {
    const auto& p = expect<UnivariateGaussianParam>(s, "ugaussian");
    if (!std::isfinite(p.mean) || !(p.variance > 0.0) || !std::isfinite(p.variance)) {
      throw DomainError("ugaussian: need a finite mean and positive variance");
    }
  }
  CompositeParam to_natural(const SourceParam& s) const override {
    validate(s);
    const auto& p = std::get<UnivariateGaussianParam>(s);
    return CompositeParam::from({p.mean / p.variance, -0.5 / p.variance});
  }
  SourceParam to_source(const CompositeParam& theta) const override {
    log_normalizer().domain().check(theta, Use::value, "natural parameter");
    const double var = -0.5 / theta.vec[1];
    return UnivariateGaussianParam{theta.vec[0] * var, var};
  }
  CompositeParam sufficient_statistic(const Eigen::VectorXd& x) const override {
    if (x.size() != 1) throw DomainError("ugaussian: observation must be a scalar");
    return CompositeParam::from({x[0], x[0] * x[0]});
  }
  double carrier(const Eigen::VectorXd&) const override { return 0.0; }

  double bhattacharyya_source_formula(const SourceParam& p, const SourceParam& q) const override {
    validate(p);
    validate(q);
    const auto& a = std::get<UnivariateGaussianParam>(p);
    const auto& b = std::get<UnivariateGaussianParam>(q);
    const double dm = a.mean - b.mean;
    const double vs = a.variance + b.variance;
    return 0.25 * dm * dm / vs + 0.5 * std::log(vs / (2.0 * std::sqrt(a.variance * b.variance)));
  }
};

class GaussianFamily final : public ExpFamily {
 public:
  explicit GaussianFamily(std::size_t dim) : ExpFamily(gaussian_log_normalizer(dim)), dim_(dim) {}
  std::string name() const override { return "mvgaussian"; }
  Support support() const override { return {false, dim_}; }

  void validate(const SourceParam& s) const override {
    const auto& p = expect<GaussianParam>(s, "mvgaussian");
    if (p.dim() != dim_) throw DomainError("mvgaussian: expected dimension " + std::to_string(dim_));
    p.validate();
  }
  CompositeParam to_natural(const SourceParam& s) const override {
    validate(s);
    const auto& p = std::get<GaussianParam>(s);
    const Eigen::MatrixXd prec = spd_inverse(p.cov);
    return CompositeParam(prec * p.mean, SymMatrix::from_dense(0.5 * prec));
  }
  SourceParam to_source(const CompositeParam& theta) const override {
    log_normalizer().domain().check(theta, Use::value, "natural parameter");
    const Eigen::MatrixXd cov = 0.5 * spd_inverse(theta.mat->dense());
    return GaussianParam{cov * theta.vec, cov};
  }
  CompositeParam sufficient_statistic(const Eigen::VectorXd& x) const override {
    if (static_cast<std::size_t>(x.size()) != dim_) throw DomainError("mvgaussian: observation has wrong dimension");
    return CompositeParam(x, SymMatrix::from_dense(-(x * x.transpose())));
  }
  double carrier(const Eigen::VectorXd&) const override { return 0.0; }

  double bhattacharyya_source_formula(const SourceParam& p, const SourceParam& q) const override {
    validate(p);
    validate(q);
    const auto& a = std::get<GaussianParam>(p);
    const auto& b = std::get<GaussianParam>(q);
    const Eigen::MatrixXd avg = 0.5 * (a.cov + b.cov);
    const Eigen::VectorXd dm = a.mean - b.mean;
    Eigen::LLT<Eigen::MatrixXd> llt(avg);
    const double maha = dm.dot(llt.solve(dm));
    return 0.125 * maha + 0.5 * (spd_log_det(avg) - 0.5 * (spd_log_det(a.cov) + spd_log_det(b.cov)));
  }

 private:
  std::size_t dim_;
};

}  // namespace

double ExpFamily::log_density(const CompositeParam& theta, const Eigen::VectorXd& x) const {
  return inner(sufficient_statistic(x), theta) - log_normalizer().eval(theta) + carrier(x);
}

double ExpFamily::density(const CompositeParam& theta, const Eigen::VectorXd& x) const {
  return std::exp(log_density(theta, x));
}

GeneratorPtr poisson_log_normalizer() { return std::make_shared<PoissonLogNormalizer>(); }

GeneratorPtr multinomial_log_normalizer(std::size_t outcomes) {
  if (outcomes < 2) throw DomainError("multinomial needs at least 2 outcomes");
  return std::make_shared<MultinomialLogNormalizer>(outcomes);
}

GeneratorPtr univariate_gaussian_log_normalizer() { return std::make_shared<UnivariateGaussianLogNormalizer>(); }

GeneratorPtr gaussian_log_normalizer(std::size_t dim) {
  if (dim == 0) throw DomainError("mvgaussian needs dimension >= 1");
  return std::make_shared<GaussianLogNormalizer>(dim);
}

ExpFamilyPtr poisson_family() { return std::make_shared<PoissonFamily>(); }
ExpFamilyPtr multinomial_family(std::size_t outcomes) { return std::make_shared<MultinomialFamily>(outcomes); }
ExpFamilyPtr univariate_gaussian_family() { return std::make_shared<UnivariateGaussianFamily>(); }
ExpFamilyPtr gaussian_family(std::size_t dim) { return std::make_shared<GaussianFamily>(dim); }

ExpFamilyPtr family_by_name(const std::string& name, std::size_t dim) {
  if (name == "poisson") return poisson_family();
  if (name == "multinomial") return multinomial_family(dim);
  if (name == "ugaussian") return univariate_gaussian_family();
  if (name == "mvgaussian") return gaussian_family(dim);
  throw DomainError("unknown family '" + name + "'");
}

CompositeParam to_natural(const ExpFamily& fam, const SourceParam& s) { return fam.to_natural(s); }
SourceParam to_source(const ExpFamily& fam, const CompositeParam& theta) { return fam.to_source(theta); }

double bhattacharyya(const ExpFamily& fam, const SourceParam& p, const SourceParam& q) {
  return burbea_rao(fam.log_normalizer(), fam.to_natural(p), fam.to_natural(q));
}

double skew_bhattacharyya(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, SkewWeight a) {
  return skew_burbea_rao(fam.log_normalizer(), fam.to_natural(p), fam.to_natural(q), a);
}

double chernoff_coefficient(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, SkewWeight a) {
  return std::exp(-skew_bhattacharyya(fam, p, q, a));
}

double hellinger(const ExpFamily& fam, const SourceParam& p, const SourceParam& q) {
  return std::sqrt(-std::expm1(-bhattacharyya(fam, p, q)));
}

double kl_divergence(const ExpFamily& fam, const SourceParam& p, const SourceParam& q) {
  return bregman(fam.log_normalizer(), fam.to_natural(q), fam.to_natural(p));
}

double amari_alpha_divergence(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (alpha == -1.0) return kl_divergence(fam, p, q);
  if (alpha == 1.0) return kl_divergence(fam, q, p);
  const double skew = 0.5 * (1.0 - alpha);
  const CompositeParam tp = fam.to_natural(p);
  const CompositeParam tq = fam.to_natural(q);
  const double gap = (skew > 0.0 && skew < 1.0)
                         ? skew_burbea_rao(fam.log_normalizer(), tp, tq, SkewWeight(skew))
                         : skew_jensen_gap(fam.log_normalizer(), tp, tq, skew);
  return clamp_nonnegative(4.0 / (1.0 - alpha * alpha) * -std::expm1(-gap), "alpha-divergence");
}

}  // namespace brc
