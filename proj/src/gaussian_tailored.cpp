#include "brc/gaussian_tailored.hpp"

#include <algorithm>
#include <cmath>

#include "brc/errors.hpp"
#include "brc/expfam.hpp"

namespace brc {

namespace {

void check_inputs(std::span<const GaussianParam> gs, std::span<const double> ws) {
  if (gs.empty()) throw WeightError("need at least one Gaussian");
  if (gs.size() != ws.size()) throw WeightError("Gaussians and weights differ in length");
  check_normalized_weights(ws, /*allow_zero=*/true);
  for (const auto& g : gs) {
    g.validate();
    if (g.dim() != gs.front().dim()) throw DomainError("Gaussians differ in dimension");
  }
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

CompositeParam gaussian_to_natural(const GaussianParam& g) {
  return gaussian_family(g.dim())->to_natural(g);
}

GaussianParam gaussian_from_natural(const CompositeParam& theta) {
  return std::get<GaussianParam>(gaussian_family(static_cast<std::size_t>(theta.vec.size()))->to_source(theta));
}

double bhattacharyya_energy(std::span<const GaussianParam> gs, std::span<const double> ws, const GaussianParam& c) {
  check_inputs(gs, ws);
  c.validate();
  const double log_det_c = spd_log_det(c.cov);
  double e = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (ws[i] == 0.0) continue;
    const Eigen::MatrixXd avg = 0.5 * (c.cov + gs[i].cov);
    const Eigen::VectorXd d = c.mean - gs[i].mean;
    Eigen::LLT<Eigen::MatrixXd> llt(avg);
    const double term = 0.125 * d.dot(llt.solve(d)) +
                        0.5 * (spd_log_det(avg) - 0.5 * (log_det_c + spd_log_det(gs[i].cov)));
    e += ws[i] * term;
  }
  return clamp_nonnegative(e, "Bhattacharyya energy");
}

Eigen::VectorXd update_mean(std::span<const GaussianParam> gs, std::span<const double> ws, const GaussianParam& c) {
  check_inputs(gs, ws);
  c.validate();
  const auto d = static_cast<Eigen::Index>(c.dim());
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (ws[i] == 0.0) continue;
    const Eigen::MatrixXd u = spd_inverse(c.cov + gs[i].cov);
    const Eigen::MatrixXd s = ws[i] * (u + u.transpose());
    lhs += s;
    rhs += s * gs[i].mean;
  }
  return symmetric_solve(symmetrized(lhs), rhs);
}

Eigen::MatrixXd update_covariance(std::span<const GaussianParam> gs, std::span<const double> ws,
                                  const GaussianParam& c) {
  check_inputs(gs, ws);
  c.validate();
  const auto d = static_cast<Eigen::Index>(c.dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  double total = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (ws[i] == 0.0) continue;
    const Eigen::MatrixXd u = spd_inverse(c.cov + gs[i].cov);
    const Eigen::VectorXd diff = c.mean - gs[i].mean;
    const Eigen::VectorXd ud = u.transpose() * diff;
    a += ws[i] * (2.0 * u.transpose() - ud * ud.transpose());
    total += ws[i];
  }
  const Eigen::MatrixXd b = a + a.transpose() - Eigen::MatrixXd(a.diagonal().asDiagonal());
  const Eigen::MatrixXd system = b + Eigen::MatrixXd(b.diagonal().asDiagonal());
  const Eigen::MatrixXd cov =
      symmetrized(2.0 * total * symmetric_solve(symmetrized(system), Eigen::MatrixXd::Identity(d, d)));
  if (!is_positive_definite(cov)) throw NotPDError("covariance update is not positive-definite");
  return cov;
}

GaussianCentroidResult solve_generic_gaussian(std::span<const GaussianParam> gs, std::span<const double> ws,
                                              const SolverConfig& cfg) {
  check_inputs(gs, ws);
  const auto f = gaussian_log_normalizer(gs.front().dim());
  std::vector<CompositeParam> thetas;
  thetas.reserve(gs.size());
  for (const auto& g : gs) thetas.push_back(gaussian_to_natural(g));
  const WeightedSet set(std::move(thetas), std::vector<double>(ws.begin(), ws.end()));
  CentroidResult r = solve_centroid(*f, set, cfg);
  return {gaussian_from_natural(r.centroid), std::move(r.report)};
}

TailoredResult solve_tailored(std::span<const GaussianParam> gs, std::span<const double> ws,
                              const SolverConfig& cfg) {
  check_inputs(gs, ws);
  cfg.validate();
  TailoredResult out;
  TailoredReport& report = out.report;

  const auto generic = solve_generic_gaussian(gs, ws, cfg);
  report.generic_energy = generic.report.energy_trace.back();

  const auto positive = std::count_if(ws.begin(), ws.end(), [](double w) { return w > 0.0; });
  if (positive == 1) {
    out.centroid = gs[static_cast<std::size_t>(std::find_if(ws.begin(), ws.end(), [](double w) { return w > 0.0; }) -
                                               ws.begin())];
    report.energy_trace = {0.0};
    report.converged = true;
    report.within_one_percent_of_generic = true;
    return out;
  }

  // Same starting point as the generic solver: barycenter of natural parameters.
  CompositeParam start = cfg.init ? *cfg.init : CompositeParam::zeros_like(gaussian_to_natural(gs.front()));
  if (!cfg.init) {
    for (std::size_t i = 0; i < gs.size(); ++i) {
      if (ws[i] > 0.0) start += ws[i] * gaussian_to_natural(gs[i]);
    }
  }
  GaussianParam c = gaussian_from_natural(start);
  report.energy_trace.push_back(bhattacharyya_energy(gs, ws, c));

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    GaussianParam next;
    try {
      next.mean = update_mean(gs, ws, c);
      next.cov = update_covariance(gs, ws, GaussianParam{next.mean, c.cov});
    } catch (const NotPDError& e) {
      report.failure = e.what();
      break;
    } catch (const SingularSystemError& e) {
      report.failure = e.what();
      break;
    }
    const double scale = std::max(max_abs(c.mean), max_abs(c.cov));
    const double change = std::max(max_abs(next.mean - c.mean), max_abs(next.cov - c.cov));
    const double step = scale > 0.0 ? change / scale : change;
    c = std::move(next);
    report.energy_trace.push_back(bhattacharyya_energy(gs, ws, c));
    report.iterations = t;
    if (step < cfg.tolerance) {
      report.converged = true;
      break;
    }
  }
  out.centroid = std::move(c);
  report.within_one_percent_of_generic = report.energy_trace.back() <= 1.01 * report.generic_energy + 1e-12;
  return out;
}

}  // namespace brc
