#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "brc/clustering.hpp"
#include "brc/expfam.hpp"

namespace brc {

using json = nlohmann::json;

/// printf("%.17g"): enough digits to round-trip any double.
std::string format_number(double x);

// Source parameters, one JSON object per family:
//   poisson      {"lambda": 2.5}               (a bare number is also accepted)
//   multinomial  {"p": [0.2, 0.3, 0.5]}        (a bare array is also accepted)
//   ugaussian    {"mean": 0.0, "var": 1.0}
//   mvgaussian   {"mean": [..], "cov": [[..], ..]}
json source_param_to_json(const SourceParam& s);
SourceParam source_param_from_json(const ExpFamily& fam, const json& j);
/// Dimension descriptor the family needs for this payload (outcomes or d).
std::size_t family_dim_from_json(const std::string& family, const json& j);

json gaussian_to_json(const GaussianParam& g);
GaussianParam gaussian_from_json(const json& j);

/// {"family": "mvgaussian", "d": d, "components": [{"weight", "mean", "cov"}]}
json mixture_to_json(const MixtureModel& m);
MixtureModel mixture_from_json(const json& j);

/// 8-bit RGB raster, row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 255;
  std::vector<std::uint8_t> rgb;
};

/// Reads binary (P6) or ASCII (P3) PPM with maxval <= 255.
Image read_ppm(std::istream& in);
Image read_ppm_file(const std::string& path);
void write_ppm(std::ostream& out, const Image& img);

/// One row per pixel: (R, G, B, x, y) with channels scaled to [0, 1] by maxval
/// and coordinates scaled to [0, 1] by width - 1 and height - 1, then
/// multiplied by `xy_scale`.
PointCloud image_to_points(const Image& img, double xy_scale = 1.0);

/// Header row followed by one comma-separated row per point.
void write_points_csv(std::ostream& out, const PointCloud& pc, const std::vector<std::string>& header);
PointCloud read_points_csv(std::istream& in);

}  // namespace brc
