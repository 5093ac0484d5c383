#include "brc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "brc/errors.hpp"
#include "brc/expfam.hpp"
#include "brc/gaussian_tailored.hpp"

namespace brc {

void MixtureModel::validate() const {
  if (components.empty()) throw DomainError("mixture has no components");
  if (weights.size() != components.size()) throw WeightError("mixture weights and components differ in length");
  check_normalized_weights(weights);
  for (const auto& c : components) {
    if (c.dim() != dim) throw DomainError("mixture component has dimension " + std::to_string(c.dim()));
    c.validate();
  }
}

void PointCloud::validate() const {
  if (rows.rows() == 0 || rows.cols() == 0) throw DomainError("point cloud is empty");
  if (!rows.allFinite()) throw DomainError("point cloud has non-finite entries");
}

namespace {

double gaussian_bhattacharyya(const GaussianParam& a, const GaussianParam& b) {
  return bhattacharyya(*gaussian_family(a.dim()), a, b);
}

// ---------------------------------------------------------------- point k-means

std::vector<std::size_t> assign_nearest(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers) {
  std::vector<std::size_t> a(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    a[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  return a;
}

Eigen::MatrixXd kmeans_pp_seed(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (std::size_t j = 1; j < k; ++j) {
    Eigen::Index pick = 0;
    if (d2.sum() > 0.0) {
      std::discrete_distribution<Eigen::Index> dist(d2.data(), d2.data() + d2.size());
      pick = dist(rng);
    } else {
      pick = first(rng);
    }
    centers.row(static_cast<Eigen::Index>(j)) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

std::vector<std::size_t> lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd& centers, int max_iterations) {
  std::vector<std::size_t> a = assign_nearest(x, centers);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centers.rows(), centers.cols());
    std::vector<double> counts(static_cast<std::size_t>(centers.rows()), 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sums.row(static_cast<Eigen::Index>(a[static_cast<std::size_t>(i)])) += x.row(i);
      counts[a[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0.0) centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
    }
    std::vector<std::size_t> next = assign_nearest(x, centers);
    if (next == a) break;
    a = std::move(next);
  }
  return a;
}

std::vector<std::size_t> cluster_sizes(const std::vector<std::size_t>& a, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t j : a) ++sizes[j];
  return sizes;
}

GaussianParam moment_fit(const Eigen::MatrixXd& x, const std::vector<std::size_t>& a, std::size_t cluster) {
  const auto d = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  double count = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (a[static_cast<std::size_t>(i)] != cluster) continue;
    mean += x.row(i).transpose();
    count += 1.0;
  }
  mean /= count;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (a[static_cast<std::size_t>(i)] != cluster) continue;
    const Eigen::VectorXd dx = x.row(i).transpose() - mean;
    cov += dx * dx.transpose();
  }
  cov = symmetrized(cov / count);
  // A covariance that is PD only up to round-off (collinear pixels, constant
  // channels) would blow up the natural parameters, so the floor applies
  // whenever the smallest eigenvalue is below eps.
  double eps = 1e-6 * cov.trace() / static_cast<double>(d);
  if (!(eps > 0.0)) eps = 1e-12;
  const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues()[0];
  if (!(smallest >= eps)) cov += eps * Eigen::MatrixXd::Identity(d, d);
  return {mean, cov};
}

}  // namespace

MixtureModel fit_mixture(const PointCloud& pc, std::size_t k, std::uint64_t seed, const SolverConfig& cfg) {
  pc.validate();
  cfg.validate();
  if (k == 0 || k > pc.size()) throw DomainError("fit_mixture needs 1 <= k <= number of points");
  const Eigen::MatrixXd& x = pc.rows;
  const std::size_t min_size = pc.dim() + 1;

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centers = kmeans_pp_seed(x, k, rng);
  std::vector<std::size_t> a = lloyd(x, centers, cfg.max_iterations);

  auto sizes = cluster_sizes(a, k);
  if (std::any_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s < min_size; })) {
    // Reseed each small cluster at the point farthest from its current center.
    std::vector<bool> taken(pc.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] >= min_size) continue;
      double best = -1.0;
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (taken[ui] || sizes[a[ui]] < min_size) continue;
        const double dist = (x.row(i) - centers.row(static_cast<Eigen::Index>(a[ui]))).squaredNorm();
        if (dist > best) {
          best = dist;
          pick = i;
        }
      }
      if (pick < 0) break;
      taken[static_cast<std::size_t>(pick)] = true;
      centers.row(static_cast<Eigen::Index>(j)) = x.row(pick);
    }
    a = lloyd(x, centers, cfg.max_iterations);
    sizes = cluster_sizes(a, k);
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] < min_size) {
        std::ostringstream os;
        os << "cluster " << j << " has " << sizes[j] << " points after reseeding; need at least " << min_size;
        throw DegenerateClusterError(os.str());
      }
    }
  }

  MixtureModel m;
  m.dim = pc.dim();
  for (std::size_t j = 0; j < k; ++j) {
    m.weights.push_back(static_cast<double>(sizes[j]) / static_cast<double>(pc.size()));
    m.components.push_back(moment_fit(x, a, j));
  }
  return m;
}

// ---------------------------------------------------------------- k-means over components

KMeansResult kmeans_bhattacharyya(std::span<const GaussianParam> components, std::span<const double> weights,
                                  std::size_t k, std::uint64_t seed, const SolverConfig& cfg) {
  const std::size_t n = components.size();
  if (n == 0 || weights.size() != n) throw WeightError("components and weights differ in length");
  check_normalized_weights(weights);
  cfg.validate();
  if (k == 0 || k > n) throw DomainError("kmeans needs 1 <= k <= number of components");
  for (const auto& c : components) {
    c.validate();
    if (c.dim() != components.front().dim()) throw DomainError("components differ in dimension");
  }

  // k-means++ style seeding with weighted Bhattacharyya distances.
  std::mt19937_64 rng(seed);
  std::vector<GaussianParam> centers;
  {
    std::discrete_distribution<std::size_t> first(weights.begin(), weights.end());
    centers.push_back(components[first(rng)]);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = weights[i] * gaussian_bhattacharyya(centers[0], components[i]);
    while (centers.size() < k) {
      std::size_t pick = 0;
      if (std::accumulate(dist.begin(), dist.end(), 0.0) > 0.0) {
        std::discrete_distribution<std::size_t> next(dist.begin(), dist.end());
        pick = next(rng);
      } else {
        // All remaining mass sits on existing centers; take the first unused index.
        pick = centers.size();
      }
      centers.push_back(components[pick]);
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = std::min(dist[i], weights[i] * gaussian_bhattacharyya(centers.back(), components[i]));
      }
    }
  }

  KMeansResult out;
  std::vector<std::size_t> assignment(n, k);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    std::vector<std::size_t> next(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double b = gaussian_bhattacharyya(centers[j], components[i]);
        if (b < best) {
          best = b;
          next[i] = j;
        }
      }
      dist[i] = best;
    }

    // Refill empty clusters with the farthest component of a cluster that can spare one.
    std::size_t moves = 0;
    for (auto sizes = cluster_sizes(next, k);; sizes = cluster_sizes(next, k)) {
      const auto empty = std::find(sizes.begin(), sizes.end(), 0u);
      if (empty == sizes.end()) break;
      if (++moves > n) throw EmptyClusterError("could not refill empty clusters");
      std::size_t far = n;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[next[i]] > 1 && weights[i] * dist[i] > far_dist) {
          far_dist = weights[i] * dist[i];
          far = i;
        }
      }
      if (far == n) throw EmptyClusterError("no cluster can spare a component");
      next[far] = static_cast<std::size_t>(empty - sizes.begin());
      dist[far] = 0.0;
    }

    const bool stable = next == assignment;
    assignment = std::move(next);
    if (stable && it > 1) break;

    for (std::size_t j = 0; j < k; ++j) {
      std::vector<GaussianParam> members;
      std::vector<double> ws;
      for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] == j) {
          members.push_back(components[i]);
          ws.push_back(weights[i]);
        }
      }
      const double total = std::accumulate(ws.begin(), ws.end(), 0.0);
      for (double& w : ws) w /= total;
      SolverConfig local = cfg;
      local.init = gaussian_to_natural(centers[j]);
      centers[j] = solve_generic_gaussian(members, ws, local).centroid;
    }

    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += weights[i] * gaussian_bhattacharyya(centers[assignment[i]], components[i]);
    out.energy_trace.push_back(e);
    out.iterations = it;
  }

  out.model.dim = components.front().dim();
  out.model.components = centers;
  out.model.weights.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.model.weights[assignment[i]] += weights[i];
  out.assignment = std::move(assignment);
  return out;
}

// ---------------------------------------------------------------- hierarchical simplification

SimplifyResult hierarchical_simplify(const MixtureModel& m, std::size_t k_target, const SolverConfig& cfg) {
  m.validate();
  if (k_target == 0 || k_target > m.size()) throw DomainError("k_target must lie in [1, number of components]");

  SimplifyResult out;
  out.model = m;
  for (std::size_t i = 0; i < m.size(); ++i) out.members.push_back({i});

  auto& comps = out.model.components;
  auto& ws = out.model.weights;
  const auto size = [&] { return comps.size(); };
  std::vector<std::vector<double>> dist(size(), std::vector<double>(size(), 0.0));
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) dist[i][j] = dist[j][i] = gaussian_bhattacharyya(comps[i], comps[j]);
  }

  while (size() > k_target) {
    std::size_t bi = 0;
    std::size_t bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = i + 1; j < size(); ++j) {
        if (dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    const double w = ws[bi] + ws[bj];
    const std::vector<GaussianParam> pair{comps[bi], comps[bj]};
    const std::vector<double> pair_w{ws[bi] / w, ws[bj] / w};
    comps[bi] = solve_generic_gaussian(pair, pair_w, cfg).centroid;
    ws[bi] = w;
    out.members[bi].insert(out.members[bi].end(), out.members[bj].begin(), out.members[bj].end());
    std::sort(out.members[bi].begin(), out.members[bi].end());

    comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(bj));
    ws.erase(ws.begin() + static_cast<std::ptrdiff_t>(bj));
    out.members.erase(out.members.begin() + static_cast<std::ptrdiff_t>(bj));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
    for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
    for (std::size_t j = 0; j < size(); ++j) {
      if (j != bi) dist[bi][j] = dist[j][bi] = gaussian_bhattacharyya(comps[bi], comps[j]);
    }
  }
  return out;
}

std::vector<std::size_t> assign_points(const MixtureModel& m, const PointCloud& pc) {
  m.validate();
  pc.validate();
  if (pc.dim() != m.dim) throw DomainError("points and mixture differ in dimension");
  struct Prepared {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double offset;
  };
  std::vector<Prepared> prep;
  for (std::size_t j = 0; j < m.size(); ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.components[j].cov);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    prep.push_back({llt, std::log(m.weights[j]) - 0.5 * log_det});
  }
  std::vector<std::size_t> out(pc.size());
  for (Eigen::Index i = 0; i < pc.rows.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const Eigen::VectorXd d = pc.rows.row(i).transpose() - m.components[j].mean;
      const double score = prep[j].offset - 0.5 * d.dot(prep[j].llt.solve(d));
      if (score > best) {
        best = score;
        out[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- solver comparison

std::string to_string(Winner w) {
  switch (w) {
    case Winner::generic:
      return "generic";
    case Winner::tailored:
      return "tailored";
    case Winner::tie:
      break;
  }
  return "tie";
}

namespace {

int iterations_to_reach(const std::vector<double>& trace, double threshold) {
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (trace[t] <= threshold) return static_cast<int>(t);
  }
  return static_cast<int>(trace.size()) - 1;
}

}  // namespace

ComparisonReport compare_solvers(std::span<const GaussianSet> instances, const SolverConfig& cfg) {
  ComparisonReport report;
  double iters_g = 0.0;
  double iters_t = 0.0;
  std::size_t correct_g = 0;
  std::size_t correct_t = 0;
  for (std::size_t id = 0; id < instances.size(); ++id) {
    ComparisonRow row;
    row.instance_id = id;
    const auto& inst = instances[id];
    std::vector<double> trace_g;
    std::vector<double> trace_t;
    bool generic_failed = false;
    bool tailored_failed = false;
    try {
      auto g = solve_generic_gaussian(inst.components, inst.weights, cfg);
      trace_g = std::move(g.report.energy_trace);
      if (!g.report.converged) row.failure = "generic: max_iterations";
    } catch (const std::exception& e) {
      generic_failed = true;
      row.failure = std::string("generic: ") + e.what();
    }
    try {
      auto t = solve_tailored(inst.components, inst.weights, cfg);
      trace_t = std::move(t.report.energy_trace);
      if (t.report.failure) {
        tailored_failed = true;
        row.failure += (row.failure.empty() ? "" : "; ") + ("tailored: " + *t.report.failure);
      } else if (!t.report.converged) {
        row.failure += (row.failure.empty() ? "" : "; ") + std::string("tailored: max_iterations");
      }
    } catch (const std::exception& e) {
      tailored_failed = true;
      row.failure += (row.failure.empty() ? "" : "; ") + (std::string("tailored: ") + e.what());
    }

    const double inf = std::numeric_limits<double>::infinity();
    row.energy_generic = trace_g.empty() ? inf : trace_g.back();
    row.energy_tailored = trace_t.empty() ? inf : trace_t.back();
    const double best = std::min(row.energy_generic, row.energy_tailored);
    const double threshold = 1.01 * best + 1e-12;
    if (row.energy_tailored > threshold) {
      row.winner = Winner::generic;
      ++report.summary.tailored_beaten;
    } else if (row.energy_generic > threshold) {
      row.winner = Winner::tailored;
      ++report.summary.generic_beaten;
    }
    row.generic_correct = !generic_failed && row.energy_generic <= threshold;
    row.tailored_correct = !tailored_failed && row.energy_tailored <= threshold;
    row.iters_generic = trace_g.empty() ? 0 : iterations_to_reach(trace_g, threshold);
    row.iters_tailored = trace_t.empty() ? 0 : iterations_to_reach(trace_t, threshold);
    correct_g += row.generic_correct ? 1 : 0;
    correct_t += row.tailored_correct ? 1 : 0;
    iters_g += row.iters_generic;
    iters_t += row.iters_tailored;
    if (generic_failed || tailored_failed) ++report.summary.failures;
    report.rows.push_back(std::move(row));
  }
  auto& s = report.summary;
  s.instances = instances.size();
  if (s.instances > 0) {
    const double n = static_cast<double>(s.instances);
    s.generic_correct_fraction = static_cast<double>(correct_g) / n;
    s.tailored_correct_fraction = static_cast<double>(correct_t) / n;
    s.mean_iters_generic = iters_g / n;
    s.mean_iters_tailored = iters_t / n;
  }
  return report;
}

std::vector<GaussianSet> random_gaussian_sets(std::size_t count, std::size_t dim, std::size_t components,
                                              std::uint64_t seed) {
  if (dim == 0 || components == 0) throw DomainError("random sets need dim >= 1 and components >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<GaussianSet> out(count);
  for (auto& set : out) {
    double total = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
      GaussianParam g;
      g.mean = Eigen::VectorXd::NullaryExpr(d, [&] { return normal(rng); });
      const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return normal(rng); });
      g.cov = symmetrized(a * a.transpose() / static_cast<double>(dim) + 0.05 * Eigen::MatrixXd::Identity(d, d));
      set.components.push_back(std::move(g));
      set.weights.push_back(expo(rng) + 1e-3);
      total += set.weights.back();
    }
    for (double& w : set.weights) w /= total;
  }
  return out;
}

}  // namespace brc
