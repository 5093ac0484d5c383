#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "brc/clustering.hpp"
#include "brc/errors.hpp"
#include "brc/expfam.hpp"
#include "brc/gaussian_tailored.hpp"
#include "support.hpp"

using namespace brc;
using namespace brc::testing;

namespace {

PointCloud two_blobs(Rng& rng, int per_blob) {
  PointCloud pc;
  pc.rows.resize(2 * per_blob, 2);
  for (int i = 0; i < 2 * per_blob; ++i) {
    const double c = i < per_blob ? 0.0 : 5.0;
    pc.rows(i, 0) = c + 0.3 * rng.normal();
    pc.rows(i, 1) = c + 0.3 * rng.normal();
  }
  return pc;
}

GaussianParam at(double x, double y, double var = 1.0) {
  return {Eigen::Vector2d(x, y), var * Eigen::MatrixXd::Identity(2, 2)};
}

MixtureModel mixture_of(std::vector<GaussianParam> comps, std::vector<double> ws) {
  MixtureModel m;
  m.dim = comps.front().dim();
  m.components = std::move(comps);
  m.weights = std::move(ws);
  return m;
}

bool is_pd(const Eigen::MatrixXd& m) { return Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success; }

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("fit_mixture with one cluster returns the sample moments") {
    Rng rng(1);
    PointCloud pc;
    pc.rows.resize(50, 3);
    for (int i = 0; i < 50; ++i) pc.rows.row(i) = rng.normal_vec(3).transpose();
    const MixtureModel m = fit_mixture(pc, 1, 7);
    REQUIRE(m.size() == 1);
    CHECK(m.weights[0] == 1.0);
    const Eigen::VectorXd mean = pc.rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = pc.rows.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 50.0;
    CHECK((m.components[0].mean - mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((m.components[0].cov - cov).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("fit_mixture recovers two separated blobs") {
    Rng rng(2);
    const PointCloud pc = two_blobs(rng, 100);
    const MixtureModel m = fit_mixture(pc, 2, 11);
    REQUIRE(m.size() == 2);
    std::vector<double> firsts{m.components[0].mean[0], m.components[1].mean[0]};
    std::sort(firsts.begin(), firsts.end());
    CHECK(std::abs(firsts[0] - 0.0) <= 0.1);
    CHECK(std::abs(firsts[1] - 5.0) <= 0.1);
    CHECK(m.weights[0] == doctest::Approx(0.5));
    for (const auto& c : m.components) CHECK(is_pd(c.cov));
    CHECK_NOTHROW(m.validate());
  }

  TEST_CASE("fit_mixture is deterministic for a fixed seed") {
    Rng rng(3);
    const PointCloud pc = two_blobs(rng, 60);
    const MixtureModel a = fit_mixture(pc, 4, 99);
    const MixtureModel b = fit_mixture(pc, 4, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.components[j].mean == b.components[j].mean);
      CHECK(a.components[j].cov == b.components[j].cov);
      CHECK(a.weights[j] == b.weights[j]);
    }
  }

  TEST_CASE("fit_mixture rejects clusters too small for a covariance") {
    Rng rng(4);
    const PointCloud pc = two_blobs(rng, 3);
    CHECK_THROWS_AS(fit_mixture(pc, 6, 1), DegenerateClusterError);
    CHECK_THROWS_AS(fit_mixture(pc, 0, 1), DomainError);
    CHECK_THROWS_AS(fit_mixture(pc, 7, 1), DomainError);
  }

  TEST_CASE("collinear points still give a positive definite covariance") {
    PointCloud pc;
    pc.rows.resize(20, 2);
    for (int i = 0; i < 20; ++i) pc.rows.row(i) << 0.1 * i, 0.2 * i;
    const MixtureModel m = fit_mixture(pc, 1, 5);
    CHECK(is_pd(m.components[0].cov));
    CHECK_NOTHROW(gaussian_to_natural(m.components[0]));
  }

  TEST_CASE("kmeans with k equal to the number of components is the identity") {
    Rng rng(5);
    std::vector<GaussianParam> comps;
    for (int i = 0; i < 5; ++i) comps.push_back({3.0 * rng.normal_vec(2), rng.spd(2)});
    const std::vector<double> w = rng.weights(5);
    const KMeansResult r = kmeans_bhattacharyya(comps, w, 5, 1);
    CHECK(r.energy_trace.back() <= 1e-10);
    std::vector<std::size_t> sorted = r.assignment;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK((r.model.components[r.assignment[i]].mean - comps[i].mean).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(r.model.weights[r.assignment[i]] == w[i]);
    }
  }

  TEST_CASE("kmeans separates two groups") {
    Rng rng(6);
    std::vector<GaussianParam> comps;
    for (int i = 0; i < 6; ++i) comps.push_back(at((i < 3 ? 0.0 : 10.0) + 0.2 * rng.normal(), 0.2 * rng.normal()));
    const std::vector<double> w = rng.weights(6);
    const KMeansResult r = kmeans_bhattacharyya(comps, w, 2, 3);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[1] == r.assignment[2]);
    CHECK(r.assignment[3] == r.assignment[4]);
    CHECK(r.assignment[4] == r.assignment[5]);
    CHECK(r.assignment[0] != r.assignment[3]);
    CHECK(r.model.weights[0] + r.model.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t t = 1; t < r.energy_trace.size(); ++t) {
      CHECK(r.energy_trace[t] <= r.energy_trace[t - 1] * (1 + 1e-9) + 1e-12);
    }
  }

  TEST_CASE("best kmeans energy does not grow with k") {
    Rng rng(7);
    std::vector<GaussianParam> comps;
    for (int i = 0; i < 12; ++i) comps.push_back({2.0 * rng.normal_vec(2), rng.spd(2)});
    const std::vector<double> w = rng.weights(12);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= 5; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        best = std::min(best, kmeans_bhattacharyya(comps, w, k, seed).energy_trace.back());
      }
      CHECK(best <= previous + 1e-9);
      previous = best;
    }
  }

  TEST_CASE("hierarchical simplification examples") {
    const MixtureModel m = mixture_of({at(0, 0), at(0, 0), at(20, 0), at(0, 20)}, {0.1, 0.2, 0.3, 0.4});
    const SimplifyResult same = hierarchical_simplify(m, 4);
    CHECK(same.model.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.model.components[i].mean == m.components[i].mean);

    const SimplifyResult r = hierarchical_simplify(m, 3);
    REQUIRE(r.model.size() == 3);
    CHECK(r.members[0] == std::vector<std::size_t>{0, 1});
    CHECK(r.model.weights[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK((r.model.components[0].cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(r.model.components[0].mean.cwiseAbs().maxCoeff() <= 1e-9);

    const MixtureModel pairs = mixture_of({at(0, 0), at(30, 0), at(0.5, 0), at(30.5, 0)}, {0.25, 0.25, 0.25, 0.25});
    const SimplifyResult two = hierarchical_simplify(pairs, 2);
    CHECK(two.members[0] == std::vector<std::size_t>{0, 2});
    CHECK(two.members[1] == std::vector<std::size_t>{1, 3});
    CHECK(two.model.components[0].mean[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(two.model.components[1].mean[0] == doctest::Approx(30.25).epsilon(1e-6));
    // Merging a pair widens the covariance along the separation.
    CHECK(two.model.components[0].cov(0, 0) > 1.0);
    CHECK_NOTHROW(two.model.validate());

    const SimplifyResult one = hierarchical_simplify(pairs, 1);
    CHECK(one.model.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.members[0] == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK_THROWS_AS(hierarchical_simplify(pairs, 0), DomainError);
    CHECK_THROWS_AS(hierarchical_simplify(pairs, 5), DomainError);
  }

  TEST_CASE("a merged pair is their Bhattacharyya centroid") {
    Rng rng(8);
    const GaussianParam a{rng.normal_vec(2), rng.spd(2)};
    const GaussianParam b{rng.normal_vec(2), rng.spd(2)};
    const MixtureModel m = mixture_of({a, b}, {0.3, 0.7});
    const GaussianParam merged = hierarchical_simplify(m, 1).model.components[0];
    const std::vector<GaussianParam> pair{a, b};
    const std::vector<double> w{0.3, 0.7};
    const double e = bhattacharyya_energy(pair, w, merged);
    for (int k = 0; k < 200; ++k) {
      GaussianParam probe = merged;
      probe.mean += rng.uniform_vec(2, -1e-3, 1e-3);
      const Eigen::MatrixXd s = rng.uniform_vec(4, -1e-3, 1e-3).reshaped(2, 2);
      probe.cov += 0.5 * (s + s.transpose());
      REQUIRE(bhattacharyya_energy(pair, w, probe) >= e - 1e-12);
    }
  }

  TEST_CASE("assign_points picks the component with the largest weighted density") {
    const MixtureModel m = mixture_of({at(0, 0), at(10, 0), at(0, 10, 4.0)}, {0.3, 0.3, 0.4});
    PointCloud pc;
    pc.rows.resize(4, 2);
    pc.rows << 0.1, 0.2, 9.5, 0.3, 0.5, 11.0, 5.2, 0.0;
    const auto a = assign_points(m, pc);
    CHECK(a == std::vector<std::size_t>{0, 1, 2, 1});
  }

  TEST_CASE("compare_solvers on identical components is a tie at zero energy") {
    Rng rng(9);
    const GaussianParam g = rng.gaussian(3);
    const std::vector<GaussianSet> sets{{{g, g, g}, {0.2, 0.3, 0.5}}};
    const ComparisonReport r = compare_solvers(sets);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].winner == Winner::tie);
    CHECK(r.rows[0].energy_generic <= 1e-10);
    CHECK(r.rows[0].energy_tailored <= 1e-10);
    CHECK(r.rows[0].generic_correct);
    CHECK(r.rows[0].tailored_correct);
    CHECK(r.rows[0].failure.empty());
    CHECK(r.summary.generic_correct_fraction == 1.0);
  }

  TEST_CASE("compare_solvers summary agrees with its rows") {
    const auto sets = random_gaussian_sets(20, 2, 3, 17);
    const ComparisonReport r = compare_solvers(sets);
    std::size_t correct_g = 0, correct_t = 0, gb = 0, tb = 0, failures = 0;
    for (const auto& row : r.rows) {
      correct_g += row.generic_correct;
      correct_t += row.tailored_correct;
      gb += row.winner == Winner::tailored;
      tb += row.winner == Winner::generic;
      failures += !row.failure.empty() && row.failure.find("max_iterations") == std::string::npos;
      const double best = std::min(row.energy_generic, row.energy_tailored);
      if (row.generic_correct) CHECK(row.energy_generic <= 1.01 * best + 1e-12);
      CHECK(row.iters_generic >= 0);
    }
    CHECK(r.summary.instances == 20);
    CHECK(r.summary.generic_correct_fraction == doctest::Approx(correct_g / 20.0));
    CHECK(r.summary.tailored_correct_fraction == doctest::Approx(correct_t / 20.0));
    CHECK(r.summary.generic_beaten == gb);
    CHECK(r.summary.tailored_beaten == tb);
    CHECK(r.summary.failures == failures);
    CHECK(to_string(Winner::tie) == "tie");
    CHECK(to_string(Winner::generic) == "generic");
    CHECK(to_string(Winner::tailored) == "tailored");
  }

  TEST_CASE("random_gaussian_sets is deterministic and well formed") {
    const auto a = random_gaussian_sets(5, 4, 3, 123);
    const auto b = random_gaussian_sets(5, 4, 3, 123);
    const auto c = random_gaussian_sets(5, 4, 3, 124);
    REQUIRE(a.size() == 5);
    CHECK(a[0].components[0].mean == b[0].components[0].mean);
    CHECK(a[4].weights == b[4].weights);
    CHECK(a[0].components[0].mean != c[0].components[0].mean);
    for (const auto& set : a) {
      double total = 0.0;
      for (double w : set.weights) total += w;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
      for (const auto& g : set.components) {
        CHECK(g.dim() == 4);
        CHECK(is_pd(g.cov));
      }
    }
    CHECK_THROWS_AS(random_gaussian_sets(1, 0, 3, 1), DomainError);
  }
}
