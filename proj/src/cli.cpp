#include "brc/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "brc/clustering.hpp"
#include "brc/divergences.hpp"
#include "brc/errors.hpp"
#include "brc/expfam.hpp"
#include "brc/gaussian_tailored.hpp"
#include "brc/io.hpp"
#include "brc/solver.hpp"

namespace brc {

namespace {

struct CommandSpec {
  std::string family;
  std::string generator;
  std::vector<std::string> inputs;
  std::optional<double> alpha;
  std::string alphas;
  std::size_t k = 0;
  std::size_t fit_k = 0;
  std::string method;
  double tolerance = 1e-10;
  int max_iterations = 200;
  std::uint64_t seed = 0;
  double xy_scale = 1.0;
  std::string assign_path;
  std::string out_path;
  std::size_t instances = 100;
  std::size_t dim = 2;
  std::size_t components = 5;

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.tolerance = tolerance;
    cfg.max_iterations = max_iterations;
    cfg.validate();
    return cfg;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// '@path' or an existing *.json path is read from disk; anything else is JSON text.
json load_json(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    text = read_file(arg.substr(1));
  } else if (arg.size() > 5 && arg.ends_with(".json") && std::filesystem::exists(arg)) {
    text = read_file(arg);
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

/// Writes `text` to the --out path when given, else to `out`.
void emit(const CommandSpec& spec, std::ostream& out, const std::string& text) {
  if (spec.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(spec.out_path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + spec.out_path + "'");
  f << text;
}

json point_to_json(const CompositeParam& p) {
  json v = json::array();
  for (double x : p.vec) v.push_back(x);
  return v;
}

CompositeParam point_from_json(const json& j) {
  if (j.is_number()) return CompositeParam::scalar(j.get<double>());
  if (!j.is_array() || j.empty()) throw ParseError("generator points must be numbers or arrays of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("generator points must be arrays of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return CompositeParam(std::move(v));
}

std::size_t point_dim(const json& j) { return j.is_array() ? j.size() : 1; }

// ---------------------------------------------------------------- divergence

int cmd_divergence(const CommandSpec& spec, std::ostream& out) {
  if (spec.inputs.size() != 2) throw ParseError("divergence needs exactly two parameter payloads");
  if (spec.family.empty() == spec.generator.empty()) throw ParseError("pass exactly one of --family or --generator");
  const json a = load_json(spec.inputs[0]);
  const json b = load_json(spec.inputs[1]);
  const double alpha = spec.alpha.value_or(0.5);
  json result;
  if (!spec.family.empty()) {
    const auto fam = family_by_name(spec.family, family_dim_from_json(spec.family, a));
    const SourceParam p = source_param_from_json(*fam, a);
    const SourceParam q = source_param_from_json(*fam, b);
    result["bhattacharyya"] = bhattacharyya(*fam, p, q);
    result["hellinger"] = hellinger(*fam, p, q);
    result["kl"] = kl_divergence(*fam, p, q);
    result["chernoff_alpha"] = {{"alpha", alpha}, {"coefficient", chernoff_coefficient(*fam, p, q, SkewWeight(alpha))},
                                {"skew_bhattacharyya", skew_bhattacharyya(*fam, p, q, SkewWeight(alpha))}};
  } else {
    const auto g = generator_by_name(spec.generator, point_dim(a));
    const CompositeParam p = point_from_json(a);
    const CompositeParam q = point_from_json(b);
    result["burbea_rao"] = burbea_rao(*g, p, q);
    result["skew_burbea_rao"] = {{"alpha", alpha}, {"value", skew_burbea_rao(*g, p, q, SkewWeight(alpha))}};
    result["bregman"] = bregman(*g, p, q);
    result["jeffreys_bregman"] = jeffreys_bregman(*g, p, q);
  }
  emit(spec, out, result.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- weighted input sets

struct LoadedSet {
  GeneratorPtr generator;
  ExpFamilyPtr family;  // null for plain generators
  std::vector<CompositeParam> points;
  std::vector<SourceParam> sources;
  std::vector<double> weights;
  std::vector<double> skews;
};

/// {"family": name | "generator": name, "items": [{"weight": w, "param"|"point": .., "skew": a}]}
/// Weights are normalized to sum to 1.
LoadedSet load_weighted_set(const json& j, const CommandSpec& spec) {
  if (!j.is_object() || !j.contains("items") || !j.at("items").is_array() || j.at("items").empty()) {
    throw ParseError("input needs a non-empty 'items' array");
  }
  const json& items = j.at("items");
  std::string family = j.value("family", spec.family);
  std::string generator = j.value("generator", spec.generator);
  if (family.empty() == generator.empty()) throw ParseError("input must name exactly one of 'family' or 'generator'");

  LoadedSet set;
  if (!family.empty()) {
    const json& first = items.at(0).contains("param") ? items.at(0).at("param") : json();
    set.family = family_by_name(family, family_dim_from_json(family, first));
    set.generator = set.family->log_normalizer_ptr();
  } else {
    const json& first = items.at(0).contains("point") ? items.at(0).at("point") : json();
    set.generator = generator_by_name(generator, point_dim(first));
  }
  double total = 0.0;
  for (const json& item : items) {
    const double w = item.value("weight", 1.0);
    if (!(w > 0.0) || !std::isfinite(w)) throw ParseError("item weights must be positive");
    set.weights.push_back(w);
    total += w;
    set.skews.push_back(item.value("skew", spec.alpha.value_or(0.5)));
    if (set.family) {
      if (!item.contains("param")) throw ParseError("family items need a 'param' field");
      set.sources.push_back(source_param_from_json(*set.family, item.at("param")));
      set.points.push_back(set.family->to_natural(set.sources.back()));
    } else {
      if (!item.contains("point")) throw ParseError("generator items need a 'point' field");
      set.points.push_back(point_from_json(item.at("point")));
    }
  }
  for (double& w : set.weights) w /= total;
  return set;
}

json centroid_to_json(const LoadedSet& set, const CompositeParam& c) {
  return set.family ? source_param_to_json(set.family->to_source(c)) : point_to_json(c);
}

json trace_json(const std::vector<double>& trace) {
  json t = json::array();
  for (double e : trace) t.push_back(e);
  return t;
}

// ---------------------------------------------------------------- centroid

int cmd_centroid(const CommandSpec& spec, std::ostream& out) {
  if (spec.inputs.size() != 1) throw ParseError("centroid needs one input file");
  const LoadedSet set = load_weighted_set(load_json(spec.inputs[0]), spec);
  const SolverConfig cfg = spec.solver();
  const std::string method = spec.method.empty() ? "generic" : spec.method;
  json result;
  result["method"] = method;
  bool converged = false;
  if (method == "generic") {
    const WeightedSet ws(set.points, set.weights, set.skews);
    const CentroidResult r = solve_centroid(*set.generator, ws, cfg);
    result["centroid"] = centroid_to_json(set, r.centroid);
    result["iterations"] = r.report.iterations;
    result["converged"] = r.report.converged;
    result["final_relative_step"] = r.report.final_relative_step;
    result["energy"] = r.report.energy_trace.back();
    result["energy_trace"] = trace_json(r.report.energy_trace);
    converged = r.report.converged;
  } else if (method == "tailored") {
    if (!set.family || (set.family->name() != "mvgaussian" && set.family->name() != "ugaussian")) {
      throw ParseError("--method tailored needs a Gaussian family");
    }
    for (double a : set.skews) {
      if (a != 0.5) throw ParseError("--method tailored computes the symmetric centroid only");
    }
    std::vector<GaussianParam> gs;
    for (const auto& s : set.sources) {
      if (const auto* u = std::get_if<UnivariateGaussianParam>(&s)) {
        gs.push_back({Eigen::VectorXd::Constant(1, u->mean), Eigen::MatrixXd::Constant(1, 1, u->variance)});
      } else {
        gs.push_back(std::get<GaussianParam>(s));
      }
    }
    const TailoredResult r = solve_tailored(gs, set.weights, cfg);
    if (set.family->name() == "ugaussian") {
      result["centroid"] = source_param_to_json(UnivariateGaussianParam{r.centroid.mean[0], r.centroid.cov(0, 0)});
    } else {
      result["centroid"] = gaussian_to_json(r.centroid);
    }
    result["iterations"] = r.report.iterations;
    result["converged"] = r.report.converged;
    result["energy"] = r.report.energy_trace.back();
    result["energy_trace"] = trace_json(r.report.energy_trace);
    result["generic_energy"] = r.report.generic_energy;
    result["within_one_percent_of_generic"] = r.report.within_one_percent_of_generic;
    if (r.report.failure) result["failure"] = *r.report.failure;
    converged = r.report.converged;
  } else {
    throw ParseError("--method must be 'generic' or 'tailored'");
  }
  emit(spec, out, result.dump(2) + "\n");
  return converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- simplify

int cmd_simplify(const CommandSpec& spec, std::ostream& out) {
  if (spec.inputs.size() != 1) throw ParseError("simplify needs one input (mixture JSON, PPM image or point CSV)");
  if (spec.k == 0) throw ParseError("--k must be a positive integer");
  const std::string& path = spec.inputs[0];
  const SolverConfig cfg = spec.solver();

  MixtureModel mixture;
  std::optional<PointCloud> points;
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".json") {
    mixture = mixture_from_json(load_json("@" + path));
  } else {
    if (ext == ".csv") {
      std::ifstream in(path);
      if (!in) throw ParseError("cannot open '" + path + "'");
      points = read_points_csv(in);
    } else {
      points = image_to_points(read_ppm_file(path), spec.xy_scale);
    }
    std::size_t fit_k = spec.fit_k;
    if (fit_k == 0) {
      // Aim for clusters about ten times the d + 1 points a covariance needs.
      const std::size_t roomy = points->size() / (10 * (points->dim() + 1));
      fit_k = std::max<std::size_t>(spec.k, std::min<std::size_t>(48, roomy));
    }
    mixture = fit_mixture(*points, fit_k, spec.seed, cfg);
  }
  if (spec.k > mixture.size()) throw ParseError("--k exceeds the number of mixture components");

  MixtureModel simplified;
  const std::string method = spec.method.empty() ? "hierarchical" : spec.method;
  if (method == "hierarchical") {
    simplified = hierarchical_simplify(mixture, spec.k, cfg).model;
  } else if (method == "kmeans") {
    simplified = kmeans_bhattacharyya(mixture.components, mixture.weights, spec.k, spec.seed, cfg).model;
  } else {
    throw ParseError("--method must be 'hierarchical' or 'kmeans' for simplify");
  }

  if (!spec.assign_path.empty()) {
    if (!points) throw ParseError("--assign needs an image or point CSV input");
    std::ofstream f(spec.assign_path);
    if (!f) throw ParseError("cannot write '" + spec.assign_path + "'");
    f << "component\n";
    for (std::size_t a : assign_points(simplified, *points)) f << a << "\n";
  }
  emit(spec, out, mixture_to_json(simplified).dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- compare

std::vector<GaussianSet> load_instances(const json& j) {
  const json& list = j.is_object() ? j.at("instances") : j;
  if (!list.is_array() || list.empty()) throw ParseError("compare input needs a non-empty list of mixtures");
  std::vector<GaussianSet> out;
  for (const json& m : list) {
    MixtureModel mix = mixture_from_json(m);
    out.push_back({std::move(mix.components), std::move(mix.weights)});
  }
  return out;
}

int cmd_compare(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  std::vector<GaussianSet> instances;
  if (spec.inputs.size() == 1) {
    instances = load_instances(load_json("@" + spec.inputs[0]));
  } else if (spec.inputs.empty()) {
    instances = random_gaussian_sets(spec.instances, spec.dim, spec.components, spec.seed);
  } else {
    throw ParseError("compare takes at most one input file");
  }
  const ComparisonReport report = compare_solvers(instances, spec.solver());
  std::ostringstream csv;
  csv << "instance_id,energy_generic,energy_tailored,winner,iters_generic,iters_tailored,failure\n";
  for (const auto& r : report.rows) {
    std::string failure = r.failure;
    for (char& c : failure) {
      if (c == ',' || c == '\n') c = ';';
    }
    csv << r.instance_id << "," << format_number(r.energy_generic) << "," << format_number(r.energy_tailored) << ","
        << to_string(r.winner) << "," << r.iters_generic << "," << r.iters_tailored << "," << failure << "\n";
  }
  emit(spec, out, csv.str());
  const auto& s = report.summary;
  err << "summary: instances=" << s.instances << " generic_correct=" << format_number(s.generic_correct_fraction)
      << " tailored_correct=" << format_number(s.tailored_correct_fraction)
      << " mean_iters_generic=" << format_number(s.mean_iters_generic)
      << " mean_iters_tailored=" << format_number(s.mean_iters_tailored) << " generic_beaten=" << s.generic_beaten
      << " tailored_beaten=" << s.tailored_beaten << " failures=" << s.failures << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- orbit

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ParseError("bad --alphas entry '" + cell + "'");
    SkewWeight{a};
    out.push_back(a);
  }
  if (out.empty()) throw ParseError("--alphas is empty");
  return out;
}

std::vector<double> default_alphas() {
  std::vector<double> out{1e-3};
  for (int i = 1; i <= 9; ++i) out.push_back(0.1 * i);
  out.push_back(1.0 - 1e-3);
  return out;
}

std::string coords_csv(const CompositeParam& p) {
  std::string s;
  for (double x : p.vec) s += "," + format_number(x);
  if (p.mat) {
    for (double x : p.mat->packed()) s += "," + format_number(x);
  }
  return s;
}

int cmd_orbit(const CommandSpec& spec, std::ostream& out) {
  if (spec.inputs.size() != 1) throw ParseError("orbit needs one input file");
  const LoadedSet set = load_weighted_set(load_json(spec.inputs[0]), spec);
  const std::vector<double> alphas = spec.alphas.empty() ? default_alphas() : parse_alphas(spec.alphas);
  const WeightedSet ws(set.points, set.weights);
  const auto orbit = skew_orbit(*set.generator, ws, alphas, spec.solver());

  const CompositeParam& shape = set.points.front();
  std::ostringstream csv;
  csv << "label,alpha";
  std::size_t columns = static_cast<std::size_t>(shape.vec.size()) + (shape.mat ? shape.mat->packed().size() : 0);
  for (std::size_t i = 0; i < columns; ++i) csv << ",c" << i;
  csv << ",converged\n";
  csv << "left_bregman,0" << coords_csv(bregman_left_centroid(*set.generator, ws)) << ",1\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    csv << "orbit," << format_number(alphas[i]) << coords_csv(orbit[i].centroid) << ","
        << (orbit[i].report.converged ? 1 : 0) << "\n";
  }
  csv << "right_bregman,1" << coords_csv(bregman_right_centroid(ws)) << ",1\n";
  emit(spec, out, csv.str());
  return kExitOk;
}

void add_solver_flags(CLI::App* sub, CommandSpec& spec) {
  sub->add_option("--tol", spec.tolerance, "Relative step tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", spec.max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--out", spec.out_path, "Write the result here instead of stdout");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommandSpec spec;
  CLI::App app{"Burbea-Rao divergences, Bhattacharyya centroids and Gaussian mixture simplification", "brc"};
  app.require_subcommand(1);

  auto* div = app.add_subcommand("divergence", "Distances between two parameters");
  div->add_option("--family", spec.family, "poisson | multinomial | ugaussian | mvgaussian");
  div->add_option("--generator", spec.generator, "quadratic | xlogx | xlogx-x | renyi:<order>");
  div->add_option("--alpha", spec.alpha, "Skew for the Chernoff coefficient (default 0.5)");
  // Two scalar positionals so bracketed JSON arrays reach us verbatim.
  std::string first_payload;
  std::string second_payload;
  div->add_option("p", first_payload, "First parameter as JSON (or @file)")->required();
  div->add_option("q", second_payload, "Second parameter as JSON (or @file)")->required();
  div->add_option("--out", spec.out_path, "Write the result here instead of stdout");

  auto* cen = app.add_subcommand("centroid", "Burbea-Rao / Bhattacharyya centroid of a weighted set");
  cen->add_option("input", spec.inputs, "Weighted set JSON")->required();
  cen->add_option("--method", spec.method, "generic | tailored");
  cen->add_option("--family", spec.family, "Family when the input does not name one");
  cen->add_option("--generator", spec.generator, "Generator when the input does not name one");
  cen->add_option("--alpha", spec.alpha, "Skew applied to items without their own (default 0.5)");
  add_solver_flags(cen, spec);

  auto* sim = app.add_subcommand("simplify", "Simplify a Gaussian mixture (or fit one to an image first)");
  sim->add_option("input", spec.inputs, "Mixture JSON, PPM image or point CSV")->required();
  sim->add_option("--k", spec.k, "Target component count")->required();
  sim->add_option("--fit-k", spec.fit_k, "Components fitted to image/point input before simplifying\n(default: max(k, min(48, n / (10 (d + 1)))))");
  sim->add_option("--method", spec.method, "hierarchical | kmeans");
  sim->add_option("--seed", spec.seed, "Random seed");
  sim->add_option("--xy-scale", spec.xy_scale, "Scale of the xy coordinates relative to color");
  sim->add_option("--assign", spec.assign_path, "Write per-point component indices (CSV)");
  add_solver_flags(sim, spec);

  auto* cmp = app.add_subcommand("compare", "Generic CCCP vs tailored Gaussian solver");
  cmp->add_option("input", spec.inputs, "JSON list of mixtures; random instances when omitted");
  cmp->add_option("--instances", spec.instances, "Number of random instances");
  cmp->add_option("--d", spec.dim, "Dimension of random instances");
  cmp->add_option("--components", spec.components, "Components per random instance");
  cmp->add_option("--seed", spec.seed, "Random seed");
  add_solver_flags(cmp, spec);

  auto* orb = app.add_subcommand("orbit", "Skew centroids between the sided Bregman centroids");
  orb->add_option("input", spec.inputs, "Weighted set JSON")->required();
  orb->add_option("--generator", spec.generator, "Generator when the input does not name one");
  orb->add_option("--family", spec.family, "Family when the input does not name one");
  orb->add_option("--alphas", spec.alphas, "Comma-separated skews in (0,1)");
  add_solver_flags(orb, spec);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "brc: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*div) {
      spec.inputs = {first_payload, second_payload};
      return cmd_divergence(spec, out);
    }
    if (*cen) return cmd_centroid(spec, out);
    if (*sim) return cmd_simplify(spec, out);
    if (*cmp) return cmd_compare(spec, out, err);
    if (*orb) return cmd_orbit(spec, out);
  } catch (const NonFiniteError& e) {
    err << "brc: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const Error& e) {
    err << "brc: " << e.what() << "\n";
    return kExitInputError;
  } catch (const json::exception& e) {
    err << "brc: malformed input: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace brc
