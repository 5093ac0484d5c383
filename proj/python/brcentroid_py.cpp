#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "brc/cli.hpp"
#include "brc/clustering.hpp"
#include "brc/divergences.hpp"
#include "brc/errors.hpp"
#include "brc/expfam.hpp"
#include "brc/gaussian_tailored.hpp"
#include "brc/io.hpp"
#include "brc/solver.hpp"

namespace py = pybind11;

namespace {

// Python objects cross the boundary as JSON so the bindings share the CLI's
// parameter schema instead of growing a second one.
brc::json to_json(const py::handle& obj) {
  const py::object dumps = py::module_::import("json").attr("dumps");
  return brc::json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const brc::json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

brc::CompositeParam point(const Eigen::VectorXd& v) { return brc::CompositeParam(v); }

brc::SolverConfig config(double tol, int max_iterations) {
  brc::SolverConfig cfg;
  cfg.tolerance = tol;
  cfg.max_iterations = max_iterations;
  cfg.validate();
  return cfg;
}

py::dict report_dict(const brc::SolverReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["energy_trace"] = r.energy_trace;
  d["final_relative_step"] = r.final_relative_step;
  return d;
}

std::pair<brc::ExpFamilyPtr, std::pair<brc::SourceParam, brc::SourceParam>> family_pair(const std::string& family,
                                                                                       const py::handle& p,
                                                                                       const py::handle& q) {
  const brc::json jp = to_json(p);
  const auto fam = brc::family_by_name(family, brc::family_dim_from_json(family, jp));
  return {fam, {brc::source_param_from_json(*fam, jp), brc::source_param_from_json(*fam, to_json(q))}};
}

std::vector<brc::GaussianParam> gaussians(const std::vector<Eigen::VectorXd>& means,
                                          const std::vector<Eigen::MatrixXd>& covs) {
  if (means.size() != covs.size()) throw brc::ConsistencyError("means and covs must have the same length");
  std::vector<brc::GaussianParam> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.push_back({means[i], covs[i]});
    out.back().validate();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_brcentroid, m) {
  m.doc() = "Burbea-Rao divergences, Bhattacharyya centroids and Gaussian mixture simplification";

  py::register_exception<brc::Error>(m, "BrcError", PyExc_ValueError);

  // Divergences on a named generator ("quadratic", "xlogx", "xlogx-x", "renyi:<order>").
  m.def(
      "burbea_rao",
      [](const std::string& generator, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        const auto g = brc::generator_by_name(generator, static_cast<std::size_t>(p.size()));
        return brc::burbea_rao(*g, point(p), point(q));
      },
      py::arg("generator"), py::arg("p"), py::arg("q"));
  m.def(
      "skew_burbea_rao",
      [](const std::string& generator, const Eigen::VectorXd& p, const Eigen::VectorXd& q, double alpha) {
        const auto g = brc::generator_by_name(generator, static_cast<std::size_t>(p.size()));
        return brc::skew_burbea_rao(*g, point(p), point(q), brc::SkewWeight(alpha));
      },
      py::arg("generator"), py::arg("p"), py::arg("q"), py::arg("alpha"));
  m.def(
      "bregman",
      [](const std::string& generator, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        const auto g = brc::generator_by_name(generator, static_cast<std::size_t>(p.size()));
        return brc::bregman(*g, point(p), point(q));
      },
      py::arg("generator"), py::arg("p"), py::arg("q"));
  m.def(
      "jeffreys_bregman",
      [](const std::string& generator, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
        const auto g = brc::generator_by_name(generator, static_cast<std::size_t>(p.size()));
        return brc::jeffreys_bregman(*g, point(p), point(q));
      },
      py::arg("generator"), py::arg("p"), py::arg("q"));

  // Distances between members of a named family, parameters as dicts.
  m.def(
      "bhattacharyya",
      [](const std::string& family, const py::object& p, const py::object& q) {
        const auto [fam, pq] = family_pair(family, p, q);
        return brc::bhattacharyya(*fam, pq.first, pq.second);
      },
      py::arg("family"), py::arg("p"), py::arg("q"));
  m.def(
      "hellinger",
      [](const std::string& family, const py::object& p, const py::object& q) {
        const auto [fam, pq] = family_pair(family, p, q);
        return brc::hellinger(*fam, pq.first, pq.second);
      },
      py::arg("family"), py::arg("p"), py::arg("q"));
  m.def(
      "chernoff_coefficient",
      [](const std::string& family, const py::object& p, const py::object& q, double alpha) {
        const auto [fam, pq] = family_pair(family, p, q);
        return brc::chernoff_coefficient(*fam, pq.first, pq.second, brc::SkewWeight(alpha));
      },
      py::arg("family"), py::arg("p"), py::arg("q"), py::arg("alpha") = 0.5);
  m.def(
      "kl_divergence",
      [](const std::string& family, const py::object& p, const py::object& q) {
        const auto [fam, pq] = family_pair(family, p, q);
        return brc::kl_divergence(*fam, pq.first, pq.second);
      },
      py::arg("family"), py::arg("p"), py::arg("q"));
  m.def(
      "to_natural",
      [](const std::string& family, const py::object& p) {
        const brc::json jp = to_json(p);
        const auto fam = brc::family_by_name(family, brc::family_dim_from_json(family, jp));
        const brc::CompositeParam theta = fam->to_natural(brc::source_param_from_json(*fam, jp));
        py::dict d;
        d["vec"] = theta.vec;
        if (theta.mat) d["mat"] = theta.mat->dense();
        return d;
      },
      py::arg("family"), py::arg("p"));

  m.def(
      "centroid",
      [](const std::string& generator, const std::vector<Eigen::VectorXd>& points, std::vector<double> weights,
         double alpha, double tol, int max_iterations) {
        if (points.empty()) throw brc::WeightError("no points");
        if (weights.empty()) weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
        std::vector<brc::CompositeParam> ps;
        for (const auto& p : points) ps.push_back(point(p));
        const auto g = brc::generator_by_name(generator, static_cast<std::size_t>(points.front().size()));
        const brc::WeightedSet set(std::move(ps), weights, std::vector<double>(points.size(), alpha));
        const brc::CentroidResult r = brc::solve_centroid(*g, set, config(tol, max_iterations));
        py::dict d = report_dict(r.report);
        d["centroid"] = r.centroid.vec;
        return d;
      },
      py::arg("generator"), py::arg("points"), py::arg("weights") = std::vector<double>{}, py::arg("alpha") = 0.5,
      py::arg("tol") = 1e-10, py::arg("max_iterations") = 200);

  m.def(
      "gaussian_centroid",
      [](const std::vector<Eigen::VectorXd>& means, const std::vector<Eigen::MatrixXd>& covs,
         std::vector<double> weights, const std::string& method, double tol, int max_iterations) {
        const auto gs = gaussians(means, covs);
        if (weights.empty()) weights.assign(gs.size(), 1.0 / static_cast<double>(gs.size()));
        const auto cfg = config(tol, max_iterations);
        py::dict d;
        if (method == "generic") {
          const auto r = brc::solve_generic_gaussian(gs, weights, cfg);
          d = report_dict(r.report);
          d["mean"] = r.centroid.mean;
          d["cov"] = r.centroid.cov;
        } else if (method == "tailored") {
          const auto r = brc::solve_tailored(gs, weights, cfg);
          d["iterations"] = r.report.iterations;
          d["converged"] = r.report.converged;
          d["energy_trace"] = r.report.energy_trace;
          d["failure"] = r.report.failure ? py::cast(*r.report.failure) : py::none();
          d["generic_energy"] = r.report.generic_energy;
          d["within_one_percent_of_generic"] = r.report.within_one_percent_of_generic;
          d["mean"] = r.centroid.mean;
          d["cov"] = r.centroid.cov;
        } else {
          throw brc::ParseError("method must be 'generic' or 'tailored'");
        }
        return d;
      },
      py::arg("means"), py::arg("covs"), py::arg("weights") = std::vector<double>{}, py::arg("method") = "generic",
      py::arg("tol") = 1e-10, py::arg("max_iterations") = 200);

  m.def(
      "fit_mixture",
      [](const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed) {
        brc::PointCloud pc{points};
        pc.validate();
        return from_json(brc::mixture_to_json(brc::fit_mixture(pc, k, seed)));
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0);

  m.def(
      "simplify",
      [](const py::object& mixture, std::size_t k, const std::string& method, std::uint64_t seed) {
        const brc::MixtureModel mix = brc::mixture_from_json(to_json(mixture));
        if (method == "hierarchical") return from_json(brc::mixture_to_json(brc::hierarchical_simplify(mix, k).model));
        if (method == "kmeans") {
          return from_json(brc::mixture_to_json(brc::kmeans_bhattacharyya(mix.components, mix.weights, k, seed).model));
        }
        throw brc::ParseError("method must be 'hierarchical' or 'kmeans'");
      },
      py::arg("mixture"), py::arg("k"), py::arg("method") = "hierarchical", py::arg("seed") = 0);

  m.def(
      "compare",
      [](std::size_t instances, std::size_t dim, std::size_t components, std::uint64_t seed) {
        const auto sets = brc::random_gaussian_sets(instances, dim, components, seed);
        const auto report = brc::compare_solvers(sets);
        const auto& s = report.summary;
        py::dict d;
        d["instances"] = s.instances;
        d["generic_correct_fraction"] = s.generic_correct_fraction;
        d["tailored_correct_fraction"] = s.tailored_correct_fraction;
        d["mean_iters_generic"] = s.mean_iters_generic;
        d["mean_iters_tailored"] = s.mean_iters_tailored;
        d["generic_beaten"] = s.generic_beaten;
        d["tailored_beaten"] = s.tailored_beaten;
        d["failures"] = s.failures;
        return d;
      },
      py::arg("instances") = 100, py::arg("dim") = 2, py::arg("components") = 5, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"brc"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out;
        std::ostringstream err;
        const int code = brc::run_cli(argv, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the brc command line in-process; returns (exit_code, stdout, stderr).");
}
