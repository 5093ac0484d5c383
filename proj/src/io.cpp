#include "brc/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "brc/errors.hpp"

namespace brc {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + " must be a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t n = j.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw ParseError(std::string(what) + " must be square");
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], what);
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json gaussian_to_json(const GaussianParam& g) { return {{"mean", vector_to_json(g.mean)}, {"cov", matrix_to_json(g.cov)}}; }

GaussianParam gaussian_from_json(const json& j) {
  GaussianParam g{vector_from_json(field(j, "mean"), "mean"), matrix_from_json(field(j, "cov"), "cov")};
  g.validate();
  return g;
}

json source_param_to_json(const SourceParam& s) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonParam>) {
          return {{"lambda", p.rate}};
        } else if constexpr (std::is_same_v<T, MultinomialParam>) {
          return {{"p", vector_to_json(p.probs)}};
        } else if constexpr (std::is_same_v<T, UnivariateGaussianParam>) {
          return {{"mean", p.mean}, {"var", p.variance}};
        } else {
          return gaussian_to_json(p);
        }
      },
      s);
}

SourceParam source_param_from_json(const ExpFamily& fam, const json& j) {
  SourceParam s;
  const std::string name = fam.name();
  if (name == "poisson") {
    s = PoissonParam{number(j.is_object() ? field(j, "lambda") : j, "lambda")};
  } else if (name == "multinomial") {
    s = MultinomialParam{vector_from_json(j.is_object() ? field(j, "p") : j, "p")};
  } else if (name == "ugaussian") {
    s = UnivariateGaussianParam{number(field(j, "mean"), "mean"), number(field(j, "var"), "var")};
  } else if (name == "mvgaussian") {
    s = GaussianParam{vector_from_json(field(j, "mean"), "mean"), matrix_from_json(field(j, "cov"), "cov")};
  } else {
    throw ParseError("no JSON schema for family '" + name + "'");
  }
  fam.validate(s);
  return s;
}

std::size_t family_dim_from_json(const std::string& family, const json& j) {
  if (family == "multinomial") return (j.is_object() ? field(j, "p") : j).size();
  if (family == "mvgaussian") return field(j, "mean").size();
  return 1;
}

json mixture_to_json(const MixtureModel& m) {
  json comps = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json c = gaussian_to_json(m.components[i]);
    c["weight"] = m.weights[i];
    comps.push_back(std::move(c));
  }
  return {{"family", "mvgaussian"}, {"d", m.dim}, {"components", std::move(comps)}};
}

MixtureModel mixture_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("mixture must be a JSON object");
  if (j.contains("family") && j.at("family") != "mvgaussian") throw ParseError("mixture family must be 'mvgaussian'");
  const json& comps = field(j, "components");
  if (!comps.is_array() || comps.empty()) throw ParseError("mixture needs a non-empty 'components' array");
  MixtureModel m;
  const json& d = field(j, "d");
  if (!d.is_number_integer() || d.get<long long>() < 1) throw ParseError("'d' must be a positive integer");
  m.dim = d.get<std::size_t>();
  for (const json& c : comps) {
    m.weights.push_back(number(field(c, "weight"), "weight"));
    m.components.push_back(gaussian_from_json(c));
  }
  m.validate();
  return m;
}

// ---------------------------------------------------------------- PPM

namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

unsigned long header_value(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  unsigned long v = 0;
  if (!(in >> v)) throw ParseError(std::string("PPM: bad ") + what);
  return v;
}

}  // namespace

Image read_ppm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '3' && magic[1] != '6')) {
    throw ParseError("unsupported image format: expected a P3 or P6 PPM");
  }
  Image img;
  img.width = header_value(in, "width");
  img.height = header_value(in, "height");
  const unsigned long maxval = header_value(in, "maxval");
  if (img.width == 0 || img.height == 0) throw ParseError("PPM: empty image");
  if (maxval == 0 || maxval > 255) throw ParseError("PPM: only 8-bit images are supported");
  img.maxval = static_cast<unsigned>(maxval);
  const std::size_t count = img.width * img.height * 3;
  img.rgb.resize(count);
  if (magic[1] == '6') {
    if (!std::isspace(in.get())) throw ParseError("PPM: missing separator after header");
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw ParseError("PPM: truncated pixel data");
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const unsigned long v = header_value(in, "sample");
      if (v > maxval) throw ParseError("PPM: sample exceeds maxval");
      img.rgb[k] = static_cast<std::uint8_t>(v);
    }
  }
  for (std::uint8_t v : img.rgb) {
    if (v > maxval) throw ParseError("PPM: sample exceeds maxval");
  }
  return img;
}

Image read_ppm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_ppm(in);
}

void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

PointCloud image_to_points(const Image& img, double xy_scale) {
  if (img.rgb.size() != img.width * img.height * 3) throw ParseError("image buffer does not match its size");
  PointCloud pc;
  pc.rows.resize(static_cast<Eigen::Index>(img.width * img.height), 5);
  const double sx = img.width > 1 ? xy_scale / static_cast<double>(img.width - 1) : 0.0;
  const double sy = img.height > 1 ? xy_scale / static_cast<double>(img.height - 1) : 0.0;
  const double sc = 1.0 / static_cast<double>(img.maxval);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const std::size_t k = y * img.width + x;
      const auto row = static_cast<Eigen::Index>(k);
      for (int c = 0; c < 3; ++c) pc.rows(row, c) = img.rgb[3 * k + static_cast<std::size_t>(c)] * sc;
      pc.rows(row, 3) = static_cast<double>(x) * sx;
      pc.rows(row, 4) = static_cast<double>(y) * sy;
    }
  }
  return pc;
}

// ---------------------------------------------------------------- CSV

void write_points_csv(std::ostream& out, const PointCloud& pc, const std::vector<std::string>& header) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  for (Eigen::Index r = 0; r < pc.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < pc.rows.cols(); ++c) out << (c ? "," : "") << format_number(pc.rows(r, c));
    out << "\n";
  }
}

PointCloud read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV: missing header row");
  const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index n = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("CSV: bad number '" + cell + "' on row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++n;
    }
    if (n != columns) throw ParseError("CSV: row " + std::to_string(rows + 1) + " has the wrong number of columns");
    ++rows;
  }
  if (rows == 0) throw ParseError("CSV: no data rows");
  PointCloud pc;
  pc.rows = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), columns);
  pc.validate();
  return pc;
}

}  // namespace brc
