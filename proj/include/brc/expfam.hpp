#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>

#include "brc/composite_param.hpp"
#include "brc/divergences.hpp"
#include "brc/gaussian.hpp"
#include "brc/generator.hpp"

namespace brc {

struct PoissonParam {
  double rate;
};

/// Single-trial multinomial (categorical) over d outcomes.
struct MultinomialParam {
  Eigen::VectorXd probs;
};

struct UnivariateGaussianParam {
  double mean;
  double variance;
};

using SourceParam = std::variant<PoissonParam, MultinomialParam, UnivariateGaussianParam, GaussianParam>;

struct Support {
  bool discrete;
  std::size_t observation_dim;
};

/// An exponential family p(x; theta) = exp(<t(x), theta> - F(theta) + k(x)).
///
/// Observations are passed as vectors: a count for Poisson, the outcome index
/// for multinomial, a scalar for the univariate Gaussian.
class ExpFamily {
 public:
  virtual ~ExpFamily() = default;

  virtual std::string name() const = 0;
  const Generator& log_normalizer() const { return *log_normalizer_; }
  GeneratorPtr log_normalizer_ptr() const { return log_normalizer_; }
  virtual Support support() const = 0;

  /// Throws DomainError if `s` is not a valid source parameter of this family.
  virtual void validate(const SourceParam& s) const = 0;
  virtual CompositeParam to_natural(const SourceParam& s) const = 0;
  virtual SourceParam to_source(const CompositeParam& theta) const = 0;

  virtual CompositeParam sufficient_statistic(const Eigen::VectorXd& x) const = 0;
  virtual double carrier(const Eigen::VectorXd& x) const = 0;

  double log_density(const CompositeParam& theta, const Eigen::VectorXd& x) const;
  double density(const CompositeParam& theta, const Eigen::VectorXd& x) const;

  /// Bhattacharyya distance from the textbook source-parameter formula,
  /// independent of the log-normalizer route.
  virtual double bhattacharyya_source_formula(const SourceParam& p, const SourceParam& q) const = 0;

 protected:
  explicit ExpFamily(GeneratorPtr f) : log_normalizer_(std::move(f)) {}

 private:
  GeneratorPtr log_normalizer_;
};

using ExpFamilyPtr = std::shared_ptr<const ExpFamily>;

ExpFamilyPtr poisson_family();
ExpFamilyPtr multinomial_family(std::size_t outcomes);
ExpFamilyPtr univariate_gaussian_family();
ExpFamilyPtr gaussian_family(std::size_t dim);

/// "poisson", "multinomial", "ugaussian", "mvgaussian"; `dim` sizes the
/// multinomial (outcomes) and multivariate Gaussian families.
ExpFamilyPtr family_by_name(const std::string& name, std::size_t dim);

// Log-normalizers, also usable directly as generators.
GeneratorPtr poisson_log_normalizer();
GeneratorPtr multinomial_log_normalizer(std::size_t outcomes);
GeneratorPtr univariate_gaussian_log_normalizer();
GeneratorPtr gaussian_log_normalizer(std::size_t dim);

CompositeParam to_natural(const ExpFamily& fam, const SourceParam& s);
SourceParam to_source(const ExpFamily& fam, const CompositeParam& theta);

/// -ln of the Bhattacharyya coefficient, through Burbea-Rao on natural parameters.
double bhattacharyya(const ExpFamily& fam, const SourceParam& p, const SourceParam& q);
/// Integral of p^a q^(1-a).
double chernoff_coefficient(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, SkewWeight a);
double skew_bhattacharyya(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, SkewWeight a);
double hellinger(const ExpFamily& fam, const SourceParam& p, const SourceParam& q);
/// Amari alpha-divergence; alpha = -1 is KL(p, q), alpha = +1 is KL(q, p).
double amari_alpha_divergence(const ExpFamily& fam, const SourceParam& p, const SourceParam& q, double alpha);
/// KL(p, q) as the Bregman divergence of F on swapped natural parameters.
double kl_divergence(const ExpFamily& fam, const SourceParam& p, const SourceParam& q);

}  // namespace brc
