#pragma once

// -----------------------------------------------------------------------------
// Config-driven orchestration: simulate -> reconstruct -> validate, plus the
// ground-truth `extents` helper.  Everything is deterministic: rerunning a
// config with the same seed byte-reproduces every CSV and PGM output.
//
// Config format: flat `key = value` lines under `[section]` headers.  Values
// are numbers, bare strings, or lists of numbers in brackets.  '#' starts a
// comment.  Angles are given in units of pi (theta = 0.25 means pi/4), and
// band edges may be given either directly (k_max = 8.37...) or in units of pi
// (k_max_pi = 2.666...).  See the README for the full schema.
//
// Outputs: one record CSV per observation ({name}_dir{j}.csv far,
// {name}_pt{j}.csv near), one indicator CSV per reconstruction, PGM heatmap
// slices, and a manifest listing every file with its SHA-256.
// -----------------------------------------------------------------------------

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>

#include "mfsi/detail/sha256.hpp"
#include "mfsi/io.hpp"
#include "mfsi/validation.hpp"

namespace mfsi::pipeline {

// ----------------------------------------------------------------- parsing ----

struct ConfigValue {
  std::string raw;
  int line = 0;
};

class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto trim = [](std::string s) {
        const std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw InvalidConfig("line " + std::to_string(line_no) + ": unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw InvalidConfig("line " + std::to_string(line_no) + ": empty section name");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw InvalidConfig("line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || section.empty())
        throw InvalidConfig("line " + std::to_string(line_no) + ": key outside a section");
      const std::string full = section + "." + key;
      if (map.kv_.count(full))
        throw InvalidConfig("line " + std::to_string(line_no) + ": duplicate key '" + full +
                            "'");
      map.kv_[full] = {value, line_no};
    }
    return map;
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  const ConfigValue& at(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw InvalidConfig("missing key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key) const { return at(key).raw; }

  double get_number(const std::string& key) const {
    const ConfigValue& v = at(key);
    try {
      return io::parse_double(v.raw, key.c_str());
    } catch (const std::exception&) {
      throw InvalidConfig("key '" + key + "' (line " + std::to_string(v.line) +
                          "): expected a number, got '" + v.raw + "'");
    }
  }

  int get_int(const std::string& key) const {
    const double v = get_number(key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-12)
      throw InvalidConfig("key '" + key + "' (line " + std::to_string(at(key).line) +
                          "): expected an integer");
    return i;
  }

  std::vector<double> get_list(const std::string& key) const {
    const ConfigValue& v = at(key);
    if (v.raw.size() < 2 || v.raw.front() != '[' || v.raw.back() != ']')
      throw InvalidConfig("key '" + key + "' (line " + std::to_string(v.line) +
                          "): expected a bracketed list");
    std::vector<double> out;
    std::string body = v.raw.substr(1, v.raw.size() - 2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      const std::string item = body.substr(pos, comma - pos);
      if (item.find_first_not_of(" \t") != std::string::npos) {
        try {
          out.push_back(io::parse_double(item, key.c_str()));
        } catch (const std::exception&) {
          throw InvalidConfig("key '" + key + "' (line " + std::to_string(v.line) +
                              "): bad list element '" + item + "'");
        }
      }
      pos = comma + 1;
    }
    return out;
  }

  const std::map<std::string, ConfigValue>& entries() const { return kv_; }

 private:
  std::map<std::string, ConfigValue> kv_;
};

// -------------------------------------------------------------- run config ----

enum class ObservationKind { kFar, kNear };

struct RunConfig {
  std::string name;
  int dim = 2;

  // domain description (kept symbolic so it can be serialized canonically)
  struct Shape {
    std::string kind;  // ball | cube | ellipse | kite
    std::vector<double> center;
    double radius = 0.0;                // ball
    std::vector<double> half_widths;    // cube
    std::vector<double> semi_axes;      // ellipse
    double scale = 1.0;                 // kite
  };
  std::vector<Shape> shapes;  // one entry, or several for a union

  std::string spatial_kind;            // constant | affine | quadratic_radial
  std::vector<double> spatial_coeffs;
  std::vector<double> temporal_coeffs;
  double t_min = 0.0;
  double t_max = 0.1;

  double k_min = 0.0;
  double k_max = 0.0;
  int band_n = 16;

  ObservationKind kind = ObservationKind::kFar;
  std::vector<double> angles_pi;        // 2-D far observations
  std::vector<double> direction_list;   // 3-D far observations, flattened
  std::vector<double> point_list;       // near observations, flattened

  std::string quadrature = "masked";    // masked | ball_product
  int resolution = 0;                   // 0: dimension default

  std::vector<double> lattice_lo, lattice_hi;
  std::vector<int> lattice_counts;

  int truncation = 0;                   // 0: use band_n
  double contrast_margin = 0.25;

  double noise_delta = 0.0;
  std::uint64_t noise_seed = 1;

  bool write_pgm = true;
  std::vector<int> slice_axes;
  std::vector<double> slice_coords;

  // ---- builders ----------------------------------------------------------

  Point vec_to_point(const std::vector<double>& v, const char* what) const {
    if (static_cast<int>(v.size()) != dim)
      throw InvalidConfig(std::string(what) + ": expected " + std::to_string(dim) +
                          " components");
    return {v[0], v[1], dim == 3 ? v[2] : 0.0, dim};
  }

  geometry::SupportDomain make_shape(const Shape& s) const {
    const Point c = vec_to_point(s.center, "center");
    if (s.kind == "ball") return geometry::SupportDomain::ball(c, s.radius);
    if (s.kind == "cube")
      return geometry::SupportDomain::cube(c, vec_to_point(s.half_widths, "half_widths"));
    if (s.kind == "ellipse") {
      if (s.semi_axes.size() != 2) throw InvalidConfig("ellipse: semi_axes needs 2 entries");
      return geometry::SupportDomain::ellipse(c, s.semi_axes[0], s.semi_axes[1]);
    }
    if (s.kind == "kite") return geometry::SupportDomain::kite(c, s.scale);
    throw InvalidConfig("unknown shape '" + s.kind + "'");
  }

  geometry::SupportDomain make_domain() const {
    if (shapes.empty()) throw InvalidConfig("no domain shapes configured");
    if (shapes.size() == 1) return make_shape(shapes.front());
    std::vector<geometry::SupportDomain> parts;
    for (const auto& s : shapes) parts.push_back(make_shape(s));
    return geometry::SupportDomain::union_of(std::move(parts));
  }

  source::SpatialFactor make_spatial() const {
    if (spatial_kind == "constant") {
      if (spatial_coeffs.size() != 1) throw InvalidConfig("constant spatial: need [c]");
      return source::ConstantSpatial{spatial_coeffs[0]};
    }
    if (spatial_kind == "affine") {
      if (static_cast<int>(spatial_coeffs.size()) != dim + 1)
        throw InvalidConfig("affine spatial: need [c0, gx, gy(, gz)]");
      Point g{spatial_coeffs[1], spatial_coeffs[2],
              dim == 3 ? spatial_coeffs[3] : 0.0, dim};
      return source::AffineSpatial{spatial_coeffs[0], g};
    }
    if (spatial_kind == "quadratic_radial") {
      if (spatial_coeffs.size() != 2) throw InvalidConfig("quadratic_radial: need [c0, c1]");
      return source::QuadraticRadialSpatial{spatial_coeffs[0], spatial_coeffs[1]};
    }
    throw InvalidConfig("unknown spatial factor '" + spatial_kind + "'");
  }

  source::SpaceTimeSource make_source() const {
    return source::SpaceTimeSource(make_domain(), make_spatial(),
                                   source::PolynomialTemporal{temporal_coeffs}, t_min, t_max);
  }

  spectral::FrequencyGrid make_grid() const {
    return spectral::FrequencyGrid(k_min, k_max, band_n);
  }

  int effective_resolution() const {
    if (resolution > 0) return resolution;
    return dim == 2 ? 256 : 48;
  }

  geometry::QuadratureRule make_quadrature() const {
    if (quadrature == "masked")
      return geometry::build_quadrature(make_domain(), effective_resolution());
    if (quadrature == "ball_product") {
      if (shapes.size() != 1 || shapes.front().kind != "ball")
        throw InvalidConfig("ball_product quadrature requires a single ball domain");
      return geometry::ball_product_quadrature(vec_to_point(shapes.front().center, "center"),
                                               shapes.front().radius, dim,
                                               effective_resolution());
    }
    throw InvalidConfig("unknown quadrature '" + quadrature + "'");
  }

  std::vector<Direction> observation_directions() const {
    std::vector<Direction> dirs;
    for (double a : angles_pi) dirs.push_back(direction_from_angle_pi(a));
    if (!direction_list.empty() && dim != 3)
      throw InvalidConfig("directions list is for 3-D runs; use angles_pi");
    if (direction_list.size() % 3 != 0)
      throw InvalidConfig("directions: expected flattened 3-D triples");
    for (std::size_t i = 0; i + 2 < direction_list.size(); i += 3) {
      Point d{direction_list[i], direction_list[i + 1], direction_list[i + 2], 3};
      const double len = norm(d);
      if (len == 0.0) throw InvalidConfig("zero observation direction");
      dirs.push_back({d.x / len, d.y / len, d.z / len, 3});
    }
    return dirs;
  }

  std::vector<Point> observation_points() const {
    if (point_list.size() % 3 != 0)
      throw InvalidConfig("points: expected flattened 3-D triples");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < point_list.size(); i += 3)
      pts.push_back(point3(point_list[i], point_list[i + 1], point_list[i + 2]));
    return pts;
  }

  indicator::Lattice make_search_lattice() const {
    const Point lo = vec_to_point(lattice_lo, "lattice.lo");
    const Point hi = vec_to_point(lattice_hi, "lattice.hi");
    if (static_cast<int>(lattice_counts.size()) != dim)
      throw InvalidConfig("lattice.counts: expected " + std::to_string(dim) + " entries");
    std::array<int, 3> counts{1, 1, 1};
    for (int a = 0; a < dim; ++a) counts[a] = lattice_counts[a];
    return indicator::make_lattice(lo, hi, counts);
  }

  int effective_truncation() const { return truncation > 0 ? truncation : band_n; }
};

namespace detail {

inline std::string list_text(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += io::format_double(v[i]);
  }
  return out + "]";
}

inline std::string list_text_int(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

}  // namespace detail

// Canonical serialized form; parse(to_text(parse(x))) == parse(x).
inline std::string to_text(const RunConfig& c) {
  std::string out;
  out += "[experiment]\nname = " + c.name + "\ndim = " + std::to_string(c.dim) + "\n\n";
  for (std::size_t i = 0; i < c.shapes.size(); ++i) {
    const auto& s = c.shapes[i];
    out += c.shapes.size() == 1 ? "[domain]\n" : "[domain_" + std::to_string(i + 1) + "]\n";
    out += "shape = " + s.kind + "\ncenter = " + detail::list_text(s.center) + "\n";
    if (s.kind == "ball") out += "radius = " + io::format_double(s.radius) + "\n";
    if (s.kind == "cube") out += "half_widths = " + detail::list_text(s.half_widths) + "\n";
    if (s.kind == "ellipse") out += "semi_axes = " + detail::list_text(s.semi_axes) + "\n";
    if (s.kind == "kite") out += "scale = " + io::format_double(s.scale) + "\n";
    out += "\n";
  }
  out += "[source]\nspatial = " + c.spatial_kind +
         "\nspatial_coeffs = " + detail::list_text(c.spatial_coeffs) +
         "\ntemporal_coeffs = " + detail::list_text(c.temporal_coeffs) +
         "\nt_min = " + io::format_double(c.t_min) +
         "\nt_max = " + io::format_double(c.t_max) + "\n\n";
  out += "[band]\nk_min = " + io::format_double(c.k_min) +
         "\nk_max = " + io::format_double(c.k_max) + "\nn = " + std::to_string(c.band_n) +
         "\n\n";
  out += "[observations]\nkind = ";
  out += c.kind == ObservationKind::kFar ? "far" : "near";
  out += "\n";
  if (!c.angles_pi.empty()) out += "angles_pi = " + detail::list_text(c.angles_pi) + "\n";
  if (!c.direction_list.empty())
    out += "directions = " + detail::list_text(c.direction_list) + "\n";
  if (!c.point_list.empty()) out += "points = " + detail::list_text(c.point_list) + "\n";
  out += "\n[simulation]\nquadrature = " + c.quadrature +
         "\nresolution = " + std::to_string(c.effective_resolution()) + "\n\n";
  out += "[lattice]\nlo = " + detail::list_text(c.lattice_lo) +
         "\nhi = " + detail::list_text(c.lattice_hi) +
         "\ncounts = " + detail::list_text_int(c.lattice_counts) + "\n\n";
  out += "[reconstruction]\ntruncation = " + std::to_string(c.effective_truncation()) +
         "\ncontrast_margin = " + io::format_double(c.contrast_margin) + "\n\n";
  out += "[noise]\ndelta = " + io::format_double(c.noise_delta) +
         "\nseed = " + std::to_string(c.noise_seed) + "\n\n";
  out += "[output]\npgm = " + std::string(c.write_pgm ? "1" : "0") + "\n";
  if (!c.slice_axes.empty()) {
    out += "slice_axes = " + detail::list_text_int(c.slice_axes) + "\n";
    out += "slice_coords = " + detail::list_text(c.slice_coords) + "\n";
  }
  return out;
}

inline RunConfig parse_run_config(const std::string& text) {
  const ConfigMap map = ConfigMap::parse(text);
  RunConfig c;
  c.name = map.get_string("experiment.name");
  if (c.name.empty() || c.name.find_first_of(" \t/\\") != std::string::npos)
    throw InvalidConfig("experiment.name must be a bare token");
  c.dim = map.get_int("experiment.dim");
  if (c.dim != 2 && c.dim != 3) throw InvalidConfig("experiment.dim must be 2 or 3");

  const auto read_shape = [&](const std::string& section) {
    RunConfig::Shape s;
    s.kind = map.get_string(section + ".shape");
    s.center = map.get_list(section + ".center");
    if (s.kind == "ball") s.radius = map.get_number(section + ".radius");
    if (s.kind == "cube") s.half_widths = map.get_list(section + ".half_widths");
    if (s.kind == "ellipse") s.semi_axes = map.get_list(section + ".semi_axes");
    if (s.kind == "kite") s.scale = map.get_number(section + ".scale");
    return s;
  };
  if (map.has("domain.shape") && map.get_string("domain.shape") == "union") {
    const int n = map.get_int("domain.components");
    if (n < 2) throw InvalidConfig("domain.components must be >= 2 for a union");
    for (int i = 1; i <= n; ++i) c.shapes.push_back(read_shape("domain_" + std::to_string(i)));
  } else {
    c.shapes.push_back(read_shape("domain"));
  }

  c.spatial_kind = map.get_string("source.spatial");
  c.spatial_coeffs = map.get_list("source.spatial_coeffs");
  c.temporal_coeffs = map.get_list("source.temporal_coeffs");
  c.t_min = map.get_number("source.t_min");
  c.t_max = map.get_number("source.t_max");

  c.k_min = map.has("band.k_min_pi") ? map.get_number("band.k_min_pi") * kPi
                                     : (map.has("band.k_min") ? map.get_number("band.k_min")
                                                              : 0.0);
  if (map.has("band.k_max_pi"))
    c.k_max = map.get_number("band.k_max_pi") * kPi;
  else
    c.k_max = map.get_number("band.k_max");
  c.band_n = map.get_int("band.n");

  const std::string kind = map.get_string("observations.kind");
  if (kind == "far")
    c.kind = ObservationKind::kFar;
  else if (kind == "near")
    c.kind = ObservationKind::kNear;
  else
    throw InvalidConfig("observations.kind must be far or near");
  if (map.has("observations.angles_pi")) c.angles_pi = map.get_list("observations.angles_pi");
  if (map.has("observations.directions"))
    c.direction_list = map.get_list("observations.directions");
  if (map.has("observations.points")) c.point_list = map.get_list("observations.points");
  if (c.kind == ObservationKind::kFar && c.angles_pi.empty() && c.direction_list.empty())
    throw InvalidConfig("far observations need angles_pi or directions");
  if (c.kind == ObservationKind::kNear && c.point_list.empty())
    throw InvalidConfig("near observations need points");
  if (c.kind == ObservationKind::kNear && c.dim != 3)
    throw InvalidConfig("near-field runs are 3-D only");

  if (map.has("simulation.quadrature")) c.quadrature = map.get_string("simulation.quadrature");
  if (map.has("simulation.resolution")) c.resolution = map.get_int("simulation.resolution");

  c.lattice_lo = map.get_list("lattice.lo");
  c.lattice_hi = map.get_list("lattice.hi");
  {
    const auto counts = map.get_list("lattice.counts");
    for (double v : counts) c.lattice_counts.push_back(static_cast<int>(std::lround(v)));
  }
  if (static_cast<int>(c.lattice_lo.size()) != c.dim ||
      static_cast<int>(c.lattice_hi.size()) != c.dim ||
      static_cast<int>(c.lattice_counts.size()) != c.dim)
    throw InvalidConfig("lattice lo/hi/counts must have " + std::to_string(c.dim) +
                        " entries (key 'lattice.lo', line " +
                        std::to_string(map.at("lattice.lo").line) + ")");
  for (int a = 0; a < c.dim; ++a) {
    if (!(c.lattice_hi[a] > c.lattice_lo[a]))
      throw InvalidConfig("zero-measure lattice (key 'lattice.hi', line " +
                          std::to_string(map.at("lattice.hi").line) + ")");
    if (c.lattice_counts[a] < 2)
      throw InvalidConfig("lattice.counts entries must be >= 2 (line " +
                          std::to_string(map.at("lattice.counts").line) + ")");
  }

  if (map.has("reconstruction.truncation"))
    c.truncation = map.get_int("reconstruction.truncation");
  if (map.has("reconstruction.contrast_margin"))
    c.contrast_margin = map.get_number("reconstruction.contrast_margin");
  if (map.has("noise.delta")) c.noise_delta = map.get_number("noise.delta");
  if (map.has("noise.seed"))
    c.noise_seed = static_cast<std::uint64_t>(map.get_number("noise.seed"));
  if (map.has("output.pgm")) c.write_pgm = map.get_int("output.pgm") != 0;
  if (map.has("output.slice_axes")) {
    for (double v : map.get_list("output.slice_axes"))
      c.slice_axes.push_back(static_cast<int>(std::lround(v)));
    c.slice_coords = map.get_list("output.slice_coords");
    if (c.slice_axes.size() != c.slice_coords.size())
      throw InvalidConfig("slice_axes and slice_coords must align");
  }

  // Validate the numeric pieces eagerly so errors surface at parse time.
  if (c.noise_delta < 0.0) throw InvalidConfig("noise.delta must be >= 0");
  if (!(c.t_max > c.t_min) || c.t_min < 0.0)
    throw InvalidConfig("source: need 0 <= t_min < t_max");
  c.make_grid();
  c.make_domain();
  c.make_spatial();
  if (c.effective_truncation() < 1 || c.effective_truncation() > c.band_n)
    throw InvalidConfig("reconstruction.truncation must lie in [1, band n]");
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(io::read_text_file(path));
}

// ---------------------------------------------------------------- manifest ----

struct Manifest {
  std::string config_sha256;
  std::vector<std::pair<std::string, long>> stage_ms;
  std::vector<std::pair<std::string, std::string>> files;  // name -> sha256

  std::string text() const {
    std::string out = "# mfsi manifest\nversion = ";
    out += kVersion;
    out += "\nconfig_sha256 = " + config_sha256 + "\n";
    for (const auto& [stage, ms] : stage_ms)
      out += "stage_" + stage + "_ms = " + std::to_string(ms) + "\n";
    for (const auto& [name, sha] : files) out += "file = " + sha + " " + name + "\n";
    return out;
  }
};

class StageTimer {
 public:
  explicit StageTimer(Manifest& manifest, std::string stage)
      : manifest_(manifest), stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    manifest_.stage_ms.emplace_back(stage_, static_cast<long>(ms));
  }

 private:
  Manifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

inline void emit_file(Manifest& manifest, const std::filesystem::path& dir,
                      const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / name, content);
  manifest.files.emplace_back(name, mfsi::detail::sha256_hex(content));
}

// ---------------------------------------------------------------- simulate ----

struct SimulateResult {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

inline SimulateResult run_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  SimulateResult result;
  Manifest manifest;
  manifest.config_sha256 = mfsi::detail::sha256_hex(to_text(cfg));

  const source::SpaceTimeSource src = cfg.make_source();
  if (src.positivity() != source::Positivity::kPositive)
    result.warnings.push_back(
        std::string("source is ") + source::to_string(src.positivity()) +
        " on D x [t_min, t_max]; the positivity constraint does not hold");

  {
    StageTimer timer(manifest, "simulate");
    const geometry::QuadratureRule quad = cfg.make_quadrature();
    const spectral::FrequencyGrid grid = cfg.make_grid();
    if (cfg.kind == ObservationKind::kFar) {
      const auto dirs = cfg.observation_directions();
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        const auto rec = forward::sample_far_band(src, quad, dirs[j], grid);
        const std::string name = cfg.name + "_dir" + std::to_string(j) + ".csv";
        emit_file(manifest, out_dir, name, io::record_csv(rec.wavenumbers, rec.values));
        result.files.push_back(name);
      }
    } else {
      const auto pts = cfg.observation_points();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto rec = forward::sample_near_band(src, quad, pts[j], grid);
        const std::string name = cfg.name + "_pt" + std::to_string(j) + ".csv";
        emit_file(manifest, out_dir, name, io::record_csv(rec.wavenumbers, rec.values));
        result.files.push_back(name);
      }
    }
  }
  io::write_text_file(out_dir / (cfg.name + "_manifest.txt"), manifest.text());
  return result;
}

// ------------------------------------------------------------- reconstruct ----

struct ReconstructResult {
  std::vector<std::string> files;
  std::vector<std::pair<std::string, double>> metrics;  // printed as metric=value
  indicator::IndicatorField field;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) throw DegenerateInput("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline ReconstructResult run_reconstruct(const RunConfig& cfg,
                                         const std::filesystem::path& data_dir,
                                         const std::filesystem::path& out_dir) {
  ReconstructResult result;
  Manifest manifest;
  manifest.config_sha256 = mfsi::detail::sha256_hex(to_text(cfg));
  const spectral::FrequencyGrid grid = cfg.make_grid();
  const indicator::Lattice lattice = cfg.make_search_lattice();
  indicator::ScanOptions opt;
  opt.noise_delta = cfg.noise_delta;
  opt.noise_seed = cfg.noise_seed;
  const int truncation = cfg.effective_truncation();

  const auto load = [&](const std::string& name) {
    const std::filesystem::path path = data_dir / name;
    if (!std::filesystem::exists(path))
      throw IncompleteRecord("data file missing: " + path.string());
    return io::parse_record_csv(io::read_text_file(path), name.c_str());
  };

  {
    StageTimer timer(manifest, "reconstruct");
    const geometry::SupportDomain domain = cfg.make_domain();
    if (cfg.kind == ObservationKind::kFar) {
      const auto dirs = cfg.observation_directions();
      std::vector<forward::FarFieldRecord> records;
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        const auto data = load(cfg.name + "_dir" + std::to_string(j) + ".csv");
        records.push_back({dirs[j], data.wavenumbers, data.values});
      }
      result.field = indicator::scan_hull(records, grid, lattice, cfg.t_min, cfg.t_max,
                                          truncation, opt);

      // Contrast metrics against the configured ground truth.
      std::vector<geometry::DirectionalExtent> extents;
      for (const auto& d : dirs) extents.push_back(geometry::directional_extent(domain, d));
      std::vector<double> inside, outside;
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        const Point y = lattice.point(i);
        bool in = true, out = false;
        for (const auto& e : extents) {
          const double p = dot(e.direction, y);
          if (!(p > e.low && p < e.high)) in = false;
          if (p < e.low - cfg.contrast_margin || p > e.high + cfg.contrast_margin) out = true;
        }
        if (in) inside.push_back(result.field.values[i]);
        if (out) outside.push_back(result.field.values[i]);
      }
      const std::string prefix = dirs.size() == 1 ? "strip" : "hull";
      if (!inside.empty() && !outside.empty()) {
        const double mi = detail::median(inside), mo = detail::median(outside);
        result.metrics.emplace_back(prefix + "_inside_median", mi);
        result.metrics.emplace_back(prefix + "_outside_median", mo);
        result.metrics.emplace_back(prefix + "_contrast", mo > 0.0 ? mi / mo
                                                                   : std::numeric_limits<double>::infinity());
      }
    } else {
      const auto pts = cfg.observation_points();
      std::vector<forward::NearFieldRecord> records;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto data = load(cfg.name + "_pt" + std::to_string(j) + ".csv");
        records.push_back({pts[j], data.wavenumbers, data.values});
      }
      result.field = indicator::scan_annulus(records, grid, lattice, cfg.t_min, cfg.t_max,
                                             truncation, opt);

      std::vector<geometry::AnnulusBounds> bounds;
      for (const auto& x : pts) bounds.push_back(geometry::annulus_bounds(domain, x));
      std::vector<double> inside, outside;
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        const Point y = lattice.point(i);
        bool in = true, out = false;
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const double r = distance(pts[j], y);
          if (!(r > bounds[j].inner && r < bounds[j].outer)) in = false;
          if (r < bounds[j].inner - cfg.contrast_margin ||
              r > bounds[j].outer + cfg.contrast_margin)
            out = true;
        }
        if (in) inside.push_back(result.field.values[i]);
        if (out) outside.push_back(result.field.values[i]);
      }
      if (!inside.empty() && !outside.empty()) {
        const double mi = detail::median(inside), mo = detail::median(outside);
        result.metrics.emplace_back("annulus_inside_median", mi);
        result.metrics.emplace_back("annulus_outside_median", mo);
        result.metrics.emplace_back("annulus_contrast", mo > 0.0 ? mi / mo
                                                                 : std::numeric_limits<double>::infinity());
      }
    }

    double w_max = 0.0;
    for (double v : result.field.values) w_max = std::max(w_max, v);
    result.metrics.emplace_back("w_max", w_max);

    const std::string field_name = cfg.name + "_field.csv";
    emit_file(manifest, out_dir, field_name, io::field_csv(result.field));
    result.files.push_back(field_name);
    if (cfg.write_pgm) {
      if (cfg.dim == 2) {
        const std::string name = cfg.name + "_field.pgm";
        emit_file(manifest, out_dir, name, io::pgm16(io::field_slice(result.field, 0, 0.0)));
        result.files.push_back(name);
      } else {
        for (std::size_t s = 0; s < cfg.slice_axes.size(); ++s) {
          const std::string name = cfg.name + "_slice_ax" +
                                   std::to_string(cfg.slice_axes[s]) + "_" +
                                   std::to_string(s) + ".pgm";
          emit_file(manifest, out_dir, name,
                    io::pgm16(io::field_slice(result.field, cfg.slice_axes[s],
                                              cfg.slice_coords[s])));
          result.files.push_back(name);
        }
      }
    }
  }
  io::write_text_file(out_dir / (cfg.name + "_reconstruct_manifest.txt"), manifest.text());
  return result;
}

// ------------------------------------------------------------------ extents ----

inline std::vector<std::pair<std::string, double>> run_extents(const RunConfig& cfg) {
  std::vector<std::pair<std::string, double>> out;
  const geometry::SupportDomain domain = cfg.make_domain();
  if (cfg.kind == ObservationKind::kFar) {
    const auto dirs = cfg.observation_directions();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const auto e = geometry::directional_extent(domain, dirs[j]);
      out.emplace_back("extent_dir" + std::to_string(j) + "_low", e.low);
      out.emplace_back("extent_dir" + std::to_string(j) + "_high", e.high);
    }
  } else {
    const auto pts = cfg.observation_points();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto b = geometry::annulus_bounds(domain, pts[j]);
      out.emplace_back("annulus_pt" + std::to_string(j) + "_inner", b.inner);
      out.emplace_back("annulus_pt" + std::to_string(j) + "_outer", b.outer);
    }
  }
  return out;
}

// ----------------------------------------------------------------- validate ----

struct CheckResult {
  std::string case_name;
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ValidateOptions {
  std::vector<std::string> cases;  // empty: all built-in cases
  bool inject_mismatch = false;    // negative control: mismatched quadrature
};

struct ValidateResult {
  std::vector<CheckResult> checks;
  bool all_pass = true;

  std::string report() const {
    std::string out = "mfsi validation report\n";
    for (const auto& c : checks) {
      out += c.case_name + " " + c.check + ": value=" + io::format_double(c.value) +
             " bound=" + io::format_double(c.bound) + (c.pass ? " PASS" : " FAIL") + "\n";
    }
    out += all_pass ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n";
    return out;
  }

  std::string residuals_csv() const {
    std::string out = "case,check,value,bound,pass\n";
    for (const auto& c : checks)
      out += c.case_name + "," + c.check + "," + io::format_double(c.value) + "," +
             io::format_double(c.bound) + "," + (c.pass ? "1" : "0") + "\n";
    return out;
  }
};

namespace detail {

struct CatalogCase {
  std::string name;
  geometry::SupportDomain domain;
  source::SpatialFactor spatial;
  double angle_pi = 0.0;     // observation direction for 2-D cases
  Direction direction3;      // for 3-D cases
  bool three_d = false;
  double k_min = 0.0;
  double k_max = 16.0 * kPi / 6.0;
  int band_n = 16;
  int resolution = 48;
  bool sign_definite = true;
  bool range_checks = false;
  bool support_checks = false;
};

inline std::vector<CatalogCase> builtin_catalog() {
  std::vector<CatalogCase> cases;
  const auto kite = geometry::SupportDomain::kite(point2(0, 0), 1.0);
  cases.push_back({"kite_constant", kite, source::ConstantSpatial{3.0}, 0.25, {}, false,
                   0.0, 16 * kPi / 6, 16, 48, true, true, false});
  cases.push_back({"kite_affine", kite, source::AffineSpatial{0.0, point2(3.0, 0.0)}, 0.5,
                   {}, false, 0.0, 16 * kPi / 6, 16, 48, false, false, false});
  cases.push_back({"kite_radial", kite, source::QuadraticRadialSpatial{-12.0, 3.0}, 0.75,
                   {}, false, 0.0, 16 * kPi / 6, 16, 48, false, false, false});
  cases.push_back({"cube", geometry::SupportDomain::cube(point3(0, 0, 0), point3(0.5, 0.5, 0.5)),
                   source::QuadraticRadialSpatial{1.0, 1.0}, 0.0, point3(1, 0, 0), true, 0.0,
                   16 * kPi / 6, 16, 16, true, false, false});
  cases.push_back({"ball", geometry::SupportDomain::ball(point3(0, 0, 0), 0.5),
                   source::ConstantSpatial{3.0}, 0.0, point3(0, 0, 1), true, 0.0,
                   16 * kPi / 6, 16, 20, true, false, true});
  cases.push_back({"ball2d_offset_band", geometry::SupportDomain::ball(point2(0.2, -0.1), 0.6),
                   source::ConstantSpatial{2.0}, 0.7, {}, false, 2.0, 6.0, 8, 40, false,
                   false, false});
  return cases;
}

}  // namespace detail

inline ValidateResult run_validate(const ValidateOptions& options,
                                   const std::filesystem::path& out_dir) {
  auto catalog = detail::builtin_catalog();
  if (!options.cases.empty()) {
    std::vector<detail::CatalogCase> filtered;
    for (auto& c : catalog)
      for (const auto& want : options.cases)
        if (c.name == want) filtered.push_back(c);
    catalog = std::move(filtered);
  }
  if (catalog.empty()) throw InvalidConfig("validation catalog selection is empty");

  ValidateResult result;
  const auto push = [&result](const std::string& case_name, const std::string& check,
                              double value, double bound, bool smaller_is_better = true) {
    CheckResult r{case_name, check, value, bound,
                  smaller_is_better ? value <= bound : value >= bound};
    result.all_pass = result.all_pass && r.pass;
    result.checks.push_back(r);
  };

  for (const auto& c : catalog) {
    const spectral::FrequencyGrid grid(c.k_min, c.k_max, c.band_n);
    source::SpaceTimeSource src(c.domain, c.spatial, source::PolynomialTemporal{{1.0, 1.0}},
                                0.0, 0.1);
    const geometry::QuadratureRule quad = geometry::build_quadrature(c.domain, c.resolution);
    const Rule1D trule = midpoint_rule(12, src.t_min(), src.t_max());
    const Direction dir = c.three_d ? c.direction3 : direction_from_angle_pi(c.angle_pi);
    const auto fact =
        validation::build_discrete_factorization(src, quad, trule, dir, grid);
    // The negative control feeds the identity a record from a different
    // spatial rule, which must blow the factorization residual.
    const geometry::QuadratureRule data_quad =
        options.inject_mismatch ? geometry::build_quadrature(c.domain, c.resolution + 7)
                                : quad;
    const auto rec = validation::matched_far_record(src, data_quad, trule, dir, grid);
    const auto F = spectral::assemble_far_operator(rec, grid);
    push(c.name, "factorization_residual", validation::factorization_residual(F.entries, fact),
         1e-8);
    if (c.sign_definite)
      push(c.name, "sharp_factorization_residual",
           validation::sharp_factorization_residual(fact), 1e-6);

    if (c.range_checks) {
      const auto ext = geometry::directional_extent(c.domain, dir);
      const double mid = 0.5 * (ext.low + ext.high);
      double inside = 0.0;
      for (double p : {mid, 0.25 * ext.low + 0.75 * mid, 0.25 * ext.high + 0.75 * mid}) {
        const auto phi = indicator::far_test_vector_from_projection(p, grid, src.t_min(),
                                                                    src.t_max());
        inside = std::max(inside,
                          validation::range_membership_residual(fact.L, phi.values));
      }
      double outside = std::numeric_limits<double>::infinity();
      for (double p : {ext.high + 1.2, ext.low - 1.2}) {
        const auto phi = indicator::far_test_vector_from_projection(p, grid, src.t_min(),
                                                                    src.t_max());
        outside = std::min(outside,
                           validation::range_membership_residual(fact.L, phi.values));
      }
      push(c.name, "range_residual_inside", inside, 1e-3);
      push(c.name, "range_residual_contrast", outside / inside, 10.0, false);
    }

    if (c.support_checks) {
      // Dense symmetric band at the preconditions' edge: +-8 k_max, dk/4.
      const double dk = grid.dk() / 4.0;
      const int half = static_cast<int>(std::lround(8.0 * c.k_max / dk));
      forward::FarFieldRecord dense;
      dense.direction = dir;
      for (int j = -half; j <= half; ++j) dense.wavenumbers.push_back(j * dk);
      dense.values.resize(dense.wavenumbers.size());
      const auto pquad = geometry::ball_product_quadrature(point3(0, 0, 0), 0.5, 3, 24);
      for (std::size_t i = 0; i < dense.wavenumbers.size(); ++i)
        dense.values[i] = forward::far_field(src, pquad, dir, dense.wavenumbers[i]);
      const auto profile = validation::inverse_transform_profile(dense, 0.1);
      const auto est = validation::support_interval_estimate(dense, 0.002, 0.1);
      const auto extent = geometry::directional_extent(c.domain, dir);
      const double lo_true = extent.low - src.t_max();
      const double hi_true = extent.high - src.t_min();
      push(c.name, "support_interval_lo_err", std::abs(est.lo - lo_true), profile.bin);
      push(c.name, "support_interval_hi_err", std::abs(est.hi - hi_true), profile.bin);
      double peak = 0.0, low = 0.0;
      for (double v : profile.values) {
        peak = std::max(peak, std::abs(v));
        low = std::min(low, v);
      }
      push(c.name, "profile_negativity", -low / peak, 0.01);
    }
  }

  std::filesystem::create_directories(out_dir);
  io::write_text_file(out_dir / "validation_report.txt", result.report());
  io::write_text_file(out_dir / "validation_residuals.csv", result.residuals_csv());
  return result;
}

}  // namespace mfsi::pipeline
