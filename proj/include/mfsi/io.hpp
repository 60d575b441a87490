#pragma once

// -----------------------------------------------------------------------------
// File formats.
//
// Numbers are written in their shortest round-trip decimal form (at most 17
// significant digits, '.' decimal separator, LF line endings), so every CSV
// reloads bit-exactly and reruns byte-reproduce their outputs.
//
//  - data records:     header "k,re,im", one row per wave number
//  - indicator fields: header "y1,y2[,y3],W", one row per lattice point
//  - heatmaps:         16-bit big-endian binary PGM (P5), one image per 2-D
//                      slice, gray = round(65535 * W / max W on the slice)
//  - matrices/spectra: row-major "re,im" pairs (debugging aid, not a stable
//                      format)
// -----------------------------------------------------------------------------

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfsi/indicator.hpp"

namespace mfsi::io {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const char* context) {
  double v = 0.0;
  // Skip leading spaces; from_chars is strict about them.
  std::size_t begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos)
    throw std::invalid_argument(std::string(context) + ": empty numeric field");
  const auto res = std::from_chars(s.data() + begin, s.data() + s.size(), v);
  if (res.ec != std::errc())
    throw std::invalid_argument(std::string(context) + ": bad number '" + std::string(s) +
                                "'");
  return v;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------ data records ----

inline std::string record_csv(const std::vector<double>& ks, const std::vector<cplx>& values) {
  std::string out = "k,re,im\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out += format_double(ks[i]);
    out += ',';
    out += format_double(values[i].real());
    out += ',';
    out += format_double(values[i].imag());
    out += '\n';
  }
  return out;
}

struct RecordData {
  std::vector<double> wavenumbers;
  std::vector<cplx> values;
};

inline RecordData parse_record_csv(const std::string& text, const char* context) {
  RecordData data;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != "k,re,im")
        throw std::invalid_argument(std::string(context) + ": unexpected header '" + line +
                                    "'");
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument(std::string(context) + ": malformed row '" + line + "'");
    data.wavenumbers.push_back(parse_double(std::string_view(line).substr(0, c1), context));
    const double re =
        parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), context);
    const double im = parse_double(std::string_view(line).substr(c2 + 1), context);
    data.values.emplace_back(re, im);
  }
  return data;
}

// --------------------------------------------------------- indicator fields ----

inline std::string field_csv(const indicator::IndicatorField& field) {
  const int d = field.lattice.dim();
  std::string out = d == 3 ? "y1,y2,y3,W\n" : "y1,y2,W\n";
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const Point p = field.lattice.point(i);
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    if (d == 3) {
      out += format_double(p.z);
      out += ',';
    }
    out += format_double(field.values[i]);
    out += '\n';
  }
  return out;
}

// ----------------------------------------------------------------- heatmaps ----

// Extract a 2-D slice of a field: for slice_axis a, the plane nearest to
// `coordinate` is used.  Returns image rows top to bottom (descending second
// remaining axis), columns in ascending first remaining axis.
struct Slice {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major
};

inline Slice field_slice(const indicator::IndicatorField& field, int slice_axis,
                         double coordinate) {
  const auto& lat = field.lattice;
  if (lat.dim() == 2) {
    Slice s;
    s.width = lat.counts[0];
    s.height = lat.counts[1];
    s.values.resize(static_cast<std::size_t>(s.width) * s.height);
    for (int row = 0; row < s.height; ++row) {
      const int iy = s.height - 1 - row;
      for (int ix = 0; ix < s.width; ++ix)
        s.values[static_cast<std::size_t>(row) * s.width + ix] =
            field.values[static_cast<std::size_t>(iy) * s.width + ix];
    }
    return s;
  }
  if (slice_axis < 0 || slice_axis > 2)
    throw std::invalid_argument("field_slice: axis must be 0, 1 or 2");
  const double lo = slice_axis == 0 ? lat.lo.x : slice_axis == 1 ? lat.lo.y : lat.lo.z;
  const double hi = slice_axis == 0 ? lat.hi.x : slice_axis == 1 ? lat.hi.y : lat.hi.z;
  const int n = lat.counts[slice_axis];
  int index = 0;
  if (n > 1) {
    const double step = (hi - lo) / (n - 1);
    index = static_cast<int>(std::lround((coordinate - lo) / step));
    index = std::clamp(index, 0, n - 1);
  }
  const int axes[2] = {slice_axis == 0 ? 1 : 0, slice_axis == 2 ? 1 : 2};
  Slice s;
  s.width = lat.counts[axes[0]];
  s.height = lat.counts[axes[1]];
  s.values.resize(static_cast<std::size_t>(s.width) * s.height);
  std::array<int, 3> idx{};
  idx[slice_axis] = index;
  for (int row = 0; row < s.height; ++row) {
    idx[axes[1]] = s.height - 1 - row;
    for (int col = 0; col < s.width; ++col) {
      idx[axes[0]] = col;
      const std::size_t flat =
          (static_cast<std::size_t>(idx[2]) * lat.counts[1] + idx[1]) * lat.counts[0] +
          idx[0];
      s.values[static_cast<std::size_t>(row) * s.width + col] = field.values[flat];
    }
  }
  return s;
}

// 16-bit big-endian binary PGM, normalized to the slice maximum.
inline std::string pgm16(const Slice& slice) {
  double w_max = 0.0;
  for (double v : slice.values) w_max = std::max(w_max, v);
  std::string out =
      "P5\n" + std::to_string(slice.width) + " " + std::to_string(slice.height) + "\n65535\n";
  out.reserve(out.size() + slice.values.size() * 2);
  for (double v : slice.values) {
    const int g = w_max > 0.0 ? static_cast<int>(std::lround(65535.0 * v / w_max)) : 0;
    const unsigned u = static_cast<unsigned>(std::clamp(g, 0, 65535));
    out.push_back(static_cast<char>((u >> 8) & 0xFF));
    out.push_back(static_cast<char>(u & 0xFF));
  }
  return out;
}

// ------------------------------------------------------------ debug dumps ----

inline std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j).real());
      out += ',';
      out += format_double(m(i, j).imag());
    }
    out += '\n';
  }
  return out;
}

}  // namespace mfsi::io
