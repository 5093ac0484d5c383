#include <doctest.h>

#include <cmath>

#include "brc/divergences.hpp"
#include "brc/errors.hpp"
#include "brc/solver.hpp"
#include "generator_cases.hpp"
#include "support.hpp"

using namespace brc;
using namespace brc::testing;

namespace {

CompositeParam s1(double x) { return CompositeParam::scalar(x); }

double xlogx(double x) { return x * std::log(x); }

/// Symmetric Burbea-Rao energy of c against {1, 4} under x log x, evaluated by hand.
double shannon_energy_1_4(double c) {
  double e = 0.0;
  for (double p : {1.0, 4.0}) e += 0.5 * (0.5 * xlogx(c) + 0.5 * xlogx(p) - xlogx(0.5 * (c + p)));
  return e;
}

WeightedSet random_set(const GeneratorCase& c, Rng& rng, std::size_t n) {
  std::vector<CompositeParam> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(c.sample(rng));
  return WeightedSet(std::move(pts), rng.weights(n));
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("energy examples") {
    const auto quad1 = make_quadratic_identity(1);
    const WeightedSet same({s1(3), s1(3)}, {0.5, 0.5});
    CHECK(energy(*quad1, same, s1(3)) == 0.0);
    const WeightedSet two({s1(0), s1(2)}, {0.5, 0.5});
    CHECK(energy(*quad1, two, s1(1)) == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("the solved centroid is a local minimum of the energy") {
    const auto shannon = make_shannon();
    Rng rng(2);
    const WeightedSet set({CompositeParam::from({0.3, 2.0}), CompositeParam::from({1.5, 0.4}),
                           CompositeParam::from({0.8, 0.9})},
                          {0.2, 0.5, 0.3});
    const CentroidResult r = solve_centroid(*shannon, set);
    const double e0 = energy(*shannon, set, r.centroid);
    for (int k = 0; k < 1000; ++k) {
      const CompositeParam c = r.centroid + CompositeParam(rng.uniform_vec(2, -1e-3, 1e-3));
      REQUIRE(energy(*shannon, set, c) >= e0);
    }
  }

  TEST_CASE("cccp_step examples") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(1), s1(4)}, {0.5, 0.5});
    // grad F = 1 + log x, so one step is the geometric mean of the midpoints.
    const double want = std::sqrt((2.5 + 1) / 2 * (2.5 + 4) / 2);
    CHECK(cccp_step(*shannon, set, s1(2.5)).vec[0] == doctest::Approx(want).epsilon(1e-12));

    SolverConfig tight;
    tight.tolerance = 1e-15;
    tight.max_iterations = 1000;
    const CentroidResult fixed = solve_centroid(*shannon, set, tight);
    CHECK(std::abs(cccp_step(*shannon, set, fixed.centroid).vec[0] - fixed.centroid.vec[0]) <= 1e-12);
  }

  TEST_CASE("quadratic step moves halfway to the weighted mean") {
    // For F = <Qx, x> and skews 1/2 the update is (c + mean) / 2, so it lands on
    // the mean in one step only when it starts there.
    Rng rng(6);
    const auto quad = make_quadratic(rng.spd(3));
    std::vector<CompositeParam> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(CompositeParam(rng.normal_vec(3)));
    const WeightedSet set(pts, rng.weights(6));
    const CompositeParam mean = bregman_right_centroid(set);
    const CompositeParam c(rng.normal_vec(3));
    const CompositeParam next = cccp_step(*quad, set, c);
    CHECK((next.vec - 0.5 * (c.vec + mean.vec)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cccp_step(*quad, set, mean).vec - mean.vec).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("solve_centroid examples") {
    const auto shannon = make_shannon();
    const WeightedSet single({s1(2.0)}, {1.0});
    const CentroidResult one = solve_centroid(*shannon, single);
    CHECK(one.centroid.vec[0] == 2.0);
    CHECK(one.report.iterations == 0);
    CHECK(one.report.converged);

    Rng rng(12);
    const auto quad = make_quadratic_identity(2);
    for (int k = 0; k < 20; ++k) {
      std::vector<CompositeParam> pts;
      for (int i = 0; i < 7; ++i) pts.push_back(CompositeParam(rng.normal_vec(2)));
      const WeightedSet set(pts, rng.weights(7));
      const CentroidResult r = solve_centroid(*quad, set);
      REQUIRE((r.centroid.vec - bregman_right_centroid(set).vec).cwiseAbs().maxCoeff() <= 1e-9);
      REQUIRE(r.report.iterations <= 2);
    }
  }

  TEST_CASE("x log x centroid of {1, 4} matches a brute-force grid search") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(1), s1(4)}, {0.5, 0.5});
    const double c = solve_centroid(*shannon, set).centroid.vec[0];
    double best = 1.0, best_e = shannon_energy_1_4(1.0);
    for (int i = 1; i <= 3000000; ++i) {
      const double x = 1.0 + 1e-6 * i;
      const double e = shannon_energy_1_4(x);
      if (e < best_e) best_e = e, best = x;
    }
    CHECK(std::abs(c - best) <= 1e-5);
  }

  TEST_CASE("energy traces never increase") {
    for (const auto& c : shipped_generators()) {
      Rng rng(100);
      for (int k = 0; k < 100; ++k) {
        const WeightedSet set = random_set(c, rng, 5);
        const CentroidResult r = solve_centroid(*c.generator, set);
        for (std::size_t t = 1; t < r.report.energy_trace.size(); ++t) {
          REQUIRE_MESSAGE(r.report.energy_trace[t] <= r.report.energy_trace[t - 1] + 1e-12, c.label);
        }
        REQUIRE_MESSAGE(r.report.converged, c.label);
      }
    }
  }

  TEST_CASE("random restarts reach the same centroid") {
    for (const auto& c : shipped_generators()) {
      Rng rng(200);
      for (int k = 0; k < 5; ++k) {
        const WeightedSet set = random_set(c, rng, 6);
        const CompositeParam ref = solve_centroid(*c.generator, set).centroid;
        for (int restart = 0; restart < 10; ++restart) {
          SolverConfig cfg;
          cfg.init = c.sample(rng);
          cfg.max_iterations = 1000;
          const CentroidResult r = solve_centroid(*c.generator, set, cfg);
          REQUIRE_MESSAGE(relative_change(r.centroid, ref) <= 1e-7, c.label);
        }
      }
    }
  }

  TEST_CASE("quadratic centroid scales with the points") {
    const auto quad = make_quadratic_identity(2);
    const WeightedSet set({CompositeParam::from({1, 2}), CompositeParam::from({-3, 0.5})}, {0.25, 0.75});
    const WeightedSet scaled({CompositeParam::from({4, 8}), CompositeParam::from({-12, 2})}, {0.25, 0.75});
    const CompositeParam a = solve_centroid(*quad, set).centroid;
    const CompositeParam b = solve_centroid(*quad, scaled).centroid;
    CHECK(b.vec == 4.0 * a.vec);
  }

  TEST_CASE("sided Bregman centroids") {
    const WeightedSet two({s1(0), s1(2)}, {0.5, 0.5});
    CHECK(bregman_right_centroid(two).vec[0] == 1.0);
    const WeightedSet single({s1(5)}, {1.0});
    CHECK(bregman_right_centroid(single).vec[0] == 5.0);
    const auto shannon = make_shannon();
    const WeightedSet pair({s1(1), s1(4)}, {0.5, 0.5});
    CHECK(bregman_left_centroid(*shannon, pair).vec[0] == doctest::Approx(2.0).epsilon(1e-14));
    const auto quad = make_quadratic_identity(1);
    CHECK(bregman_left_centroid(*quad, two).vec[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("skew orbit endpoints approach the sided centroids") {
    for (const auto& c : shipped_generators()) {
      Rng rng(300);
      const WeightedSet set = random_set(c, rng, 4);
      SolverConfig cfg;
      cfg.max_iterations = 100000;
      const std::vector<double> alphas{1e-3, 0.5, 1.0 - 1e-3};
      const auto orbit = skew_orbit(*c.generator, set, alphas, cfg);
      const CompositeParam left = bregman_left_centroid(*c.generator, set);
      const CompositeParam right = bregman_right_centroid(set);
      CHECK_MESSAGE(relative_change(orbit[0].centroid, left) <= 1e-2, c.label);
      CHECK_MESSAGE(relative_change(orbit[2].centroid, right) <= 1e-2, c.label);
      CHECK_MESSAGE(orbit[2].report.converged, c.label);
      const CompositeParam sym = solve_centroid(*c.generator, set).centroid;
      CHECK_MESSAGE(relative_change(orbit[1].centroid, sym) <= 1e-9, c.label);
    }
  }

  TEST_CASE("quadratic orbit is constant") {
    const auto quad = make_quadratic_identity(2);
    const WeightedSet set({CompositeParam::from({1, 2}), CompositeParam::from({-3, 0.5}), CompositeParam::from({0, 4})},
                          {0.2, 0.3, 0.5});
    std::vector<double> alphas;
    for (int i = 1; i <= 9; ++i) alphas.push_back(0.1 * i);
    SolverConfig cfg;
    cfg.max_iterations = 1000;
    for (const auto& r : skew_orbit(*quad, set, alphas, cfg)) {
      CHECK((r.centroid.vec - bregman_right_centroid(set).vec).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("x log x orbit moves monotonically between the sided centroids") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(1), s1(4)}, {0.5, 0.5});
    std::vector<double> alphas;
    for (int i = 1; i <= 9; ++i) alphas.push_back(0.1 * i);
    const auto orbit = skew_orbit(*shannon, set, alphas);
    for (std::size_t i = 1; i < orbit.size(); ++i) CHECK(orbit[i].centroid.vec[0] > orbit[i - 1].centroid.vec[0]);
    CHECK(orbit.front().centroid.vec[0] > 2.0);
    CHECK(orbit.back().centroid.vec[0] < 2.5);
  }

  TEST_CASE("per-point skews") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(1), s1(4), s1(2)}, {0.3, 0.3, 0.4}, {0.2, 0.5, 0.9});
    const CentroidResult r = solve_centroid(*shannon, set);
    CHECK(r.report.converged);
    CHECK(std::abs(cccp_step(*shannon, set, r.centroid).vec[0] - r.centroid.vec[0]) <= 1e-9);
  }

  TEST_CASE("zero weights are ignored") {
    const auto shannon = make_shannon();
    const WeightedSet with_zero({s1(1), s1(4), s1(100)}, {0.5, 0.5, 0.0});
    const WeightedSet without({s1(1), s1(4)}, {0.5, 0.5});
    CHECK(solve_centroid(*shannon, with_zero).centroid.vec[0] ==
          doctest::Approx(solve_centroid(*shannon, without).centroid.vec[0]).epsilon(1e-12));
    const WeightedSet lone({s1(3), s1(9)}, {0.0, 1.0});
    CHECK(solve_centroid(*shannon, lone).centroid.vec[0] == 9.0);
    CHECK_THROWS_AS(WeightedSet({s1(1), s1(2)}, {0.0, 0.0}), WeightError);
    CHECK_THROWS_AS(WeightedSet({s1(1), s1(2)}, {0.7, 0.7}), WeightError);
    CHECK_THROWS_AS(WeightedSet({}, {}), WeightError);
  }

  TEST_CASE("running out of iterations is reported, not thrown") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(1), s1(40)}, {0.5, 0.5});
    SolverConfig cfg;
    cfg.max_iterations = 2;
    const CentroidResult r = solve_centroid(*shannon, set, cfg);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.iterations == 2);
    CHECK(r.report.energy_trace.size() == 3);
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(solve_centroid(*shannon, set, cfg), DomainError);
    cfg.max_iterations = 10;
    cfg.tolerance = 0.0;
    CHECK_THROWS_AS(solve_centroid(*shannon, set, cfg), DomainError);
  }

  TEST_CASE("points outside the domain are rejected") {
    const auto shannon = make_shannon();
    const WeightedSet set({s1(-1), s1(2)}, {0.5, 0.5});
    CHECK_THROWS_AS(solve_centroid(*shannon, set), DomainError);
  }

  TEST_CASE("quasi-arithmetic means") {
    const std::vector<double> w{0.5, 0.5};
    const auto id = [](double x) { return x; };
    const auto log_f = [](double x) { return std::log(x); };
    const auto exp_f = [](double x) { return std::exp(x); };
    const auto inv = [](double x) { return 1.0 / x; };
    const std::vector<double> a{1, 3}, b{1, 4}, c{1, 1.0 / 3};
    CHECK(quasi_arithmetic_mean(id, id, a, w) == 2.0);
    CHECK(quasi_arithmetic_mean(log_f, exp_f, b, w) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(quasi_arithmetic_mean(inv, inv, c, w) == doctest::Approx(0.5).epsilon(1e-14));
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> xs{rng.uniform(0.1, 5), rng.uniform(0.1, 5), rng.uniform(0.1, 5)};
      const double m = quasi_arithmetic_mean(log_f, exp_f, xs, rng.weights(3));
      REQUIRE(m >= *std::min_element(xs.begin(), xs.end()) - 1e-12);
      REQUIRE(m <= *std::max_element(xs.begin(), xs.end()) + 1e-12);
    }
  }
}
