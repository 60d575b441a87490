#pragma once

// -----------------------------------------------------------------------------
// Test vectors and the Picard-sum indicator functions evaluated over sampling
// lattices.
//
// Far-field test vector at tau_n = n dk (the band operator grid):
//
//   phi_n(y) = (1/T) (e^{i tau_n t_max} - e^{i tau_n t_min}) / (i tau_n)
//              * e^{-i tau_n xhat . y},
//
// written in the cancellation-free form e^{i tau_n (t_mid - xhat.y)}
// sinc(tau_n T / 2); for t_min = 0 it reduces to the familiar
// (-i / (T tau_n)) (e^{i tau_n T} - 1) e^{-i tau_n xhat . y}.  The smoothed
// variant averages the spatial phase over a ball of radius eps (closed 1-D
// reduction in 3-D, a Bessel-type radial quadrature in 2-D).  The near-field
// test vector is e^{i k |x-y|} times the same time window over 4 pi k |x-y| T.
//
// Indicators: W = [ sum_j sum_n |<phi, psi_n>|^2 / lambda_n ]^{-1} with the
// eigensystem of F# per observation, a truncation number, an eigenvalue floor
// of 1e-14 * lambda_1 against numerically zero modes, and for noisy data the
// noise-matched cutoff lambda_n >= delta * lambda_1.  The inner product is the
// unweighted Euclidean one on C^N; any consistent weight cancels in contrast
// ratios.
//
// Strip indicators depend on y only through the projection xhat . y, and
// annulus indicators only through the distance |x - y|; the *_from_projection
// and *_from_distance entry points make that exact by construction.
// -----------------------------------------------------------------------------

#include <array>
#include <optional>

#include "mfsi/spectral.hpp"

namespace mfsi::indicator {

// ------------------------------------------------------------ test vectors ----

enum class TestVectorKind { kFar, kFarSmoothed, kNear };

struct TestVector {
  Eigen::VectorXcd values;
  TestVectorKind kind = TestVectorKind::kFar;
};

// Mean of e^{-i tau xhat . z} over a ball of radius eps (u = tau * eps):
// 3-D: 3 (sin u - u cos u) / u^3;  2-D: the radial Bessel reduction evaluated
// by quadrature (exact value 2 J_1(u) / u).
inline double ball_average_factor(double u, int dim) {
  const double au = std::abs(u);
  if (dim == 3) {
    if (au < 1e-4) return 1.0 - u * u / 10.0;
    return 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
  }
  if (au < 1e-6) return 1.0;
  // (2/pi) integral_{-pi/2}^{pi/2} cos^2(theta) cos(u sin theta) d theta
  static const Rule1D gl = gauss_legendre_rule(64, -0.5 * kPi, 0.5 * kPi);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double c = std::cos(gl.nodes[i]);
    acc += gl.weights[i] * c * c * std::cos(u * std::sin(gl.nodes[i]));
  }
  return 2.0 / kPi * acc;
}

inline TestVector far_test_vector_from_projection(double projection,
                                                  const spectral::FrequencyGrid& grid,
                                                  double t_min, double t_max) {
  if (!(t_max > t_min)) throw std::invalid_argument("far_test_vector: need t_min < t_max");
  TestVector phi;
  phi.kind = TestVectorKind::kFar;
  phi.values.resize(grid.n());
  for (int n = 1; n <= grid.n(); ++n) {
    const double tau = grid.tau(n);
    phi.values[n - 1] =
        unit_phase_window(tau, t_min, t_max) * std::exp(-kImag * (tau * projection));
  }
  return phi;
}

inline TestVector far_test_vector(const Point& y, const Direction& direction,
                                  const spectral::FrequencyGrid& grid, double t_min,
                                  double t_max) {
  require_unit(direction, "far_test_vector");
  require_same_dim(direction.dim, y.dim, "far_test_vector");
  return far_test_vector_from_projection(dot(direction, y), grid, t_min, t_max);
}

inline TestVector smoothed_far_test_vector(const Point& y, const Direction& direction,
                                           const spectral::FrequencyGrid& grid, double t_min,
                                           double t_max, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("smoothed_far_test_vector: eps must be > 0");
  TestVector phi = far_test_vector(y, direction, grid, t_min, t_max);
  phi.kind = TestVectorKind::kFarSmoothed;
  for (int n = 1; n <= grid.n(); ++n)
    phi.values[n - 1] *= ball_average_factor(grid.tau(n) * eps, y.dim);
  return phi;
}

inline TestVector near_test_vector_from_distance(double r, const spectral::FrequencyGrid& grid,
                                                 double t_min, double t_max) {
  if (!(t_max > t_min)) throw std::invalid_argument("near_test_vector: need t_min < t_max");
  if (r < 1e-9)
    throw SingularTestPoint("near test vector at the sensor position; exclude lattice "
                            "points within 1e-9 of the sensor");
  TestVector phi;
  phi.kind = TestVectorKind::kNear;
  phi.values.resize(grid.n());
  for (int n = 1; n <= grid.n(); ++n) {
    const double tau = grid.tau(n);
    phi.values[n - 1] = std::exp(kImag * (tau * r)) * unit_phase_window(tau, t_min, t_max) /
                        (4.0 * kPi * r);
  }
  return phi;
}

inline TestVector near_test_vector(const Point& y, const Point& sensor,
                                   const spectral::FrequencyGrid& grid, double t_min,
                                   double t_max) {
  if (y.dim != 3 || sensor.dim != 3)
    throw std::invalid_argument("near_test_vector: 3-D only");
  return near_test_vector_from_distance(distance(sensor, y), grid, t_min, t_max);
}

// ------------------------------------------------------------- Picard sums ----

struct PicardResult {
  enum class Status { kOk, kEmptySum, kZeroTestVector };
  double value = 0.0;
  Status status = Status::kOk;
};

inline constexpr double kEigenvalueFloorRel = 1e-14;

namespace detail {

// sum_{n <= truncation, lambda_n >= floor_abs} |<phi, psi_n>|^2 / lambda_n.
// Returns the number of kept terms through `kept`.
inline double picard_inverse_sum(const spectral::OperatorSpectrum& spectrum,
                                 const Eigen::VectorXcd& phi, int truncation,
                                 double floor_abs, int* kept = nullptr) {
  const Eigen::VectorXcd coeffs = spectrum.eigenvectors.adjoint() * phi;
  double acc = 0.0;
  int used = 0;
  for (int n = 0; n < truncation; ++n) {
    const double lam = spectrum.eigenvalues[n];
    if (lam < floor_abs) break;  // eigenvalues are descending
    acc += std::norm(coeffs[n]) / lam;
    ++used;
  }
  if (kept) *kept = used;
  return acc;
}

}  // namespace detail

// W = [ sum_{n <= truncation} |<phi, psi_n>|^2 / lambda_n ]^{-1}, dropping
// modes below floor_rel * lambda_1.  An all-floored spectrum yields the W = 0
// convention with a flag; a zero test vector yields the infinite sentinel.
inline PicardResult picard_value(const spectral::OperatorSpectrum& spectrum,
                                 const TestVector& phi, int truncation,
                                 double floor_rel = kEigenvalueFloorRel) {
  const int n = static_cast<int>(spectrum.eigenvalues.size());
  if (truncation < 1 || truncation > n)
    throw std::invalid_argument("picard_value: truncation out of range");
  if (phi.values.norm() == 0.0)
    return {std::numeric_limits<double>::infinity(), PicardResult::Status::kZeroTestVector};
  const double floor_abs =
      spectrum.eigenvalues.size() ? floor_rel * spectrum.eigenvalues[0] : 0.0;
  int kept = 0;
  const double inv = detail::picard_inverse_sum(spectrum, phi.values, truncation,
                                                std::max(floor_abs, 1e-300), &kept);
  if (kept == 0) return {0.0, PicardResult::Status::kEmptySum};
  return {inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity(),
          PicardResult::Status::kOk};
}

// ---------------------------------------------------------------- lattices ----

struct Lattice {
  Point lo;
  Point hi;
  std::array<int, 3> counts{1, 1, 1};

  int dim() const { return lo.dim; }

  std::size_t size() const {
    return static_cast<std::size_t>(counts[0]) * counts[1] * (dim() == 3 ? counts[2] : 1);
  }

  static double coordinate(double a, double b, int n, int i) {
    return n > 1 ? a + i * (b - a) / (n - 1) : a;
  }

  // x varies fastest, then y, then z.
  Point point(std::size_t index) const {
    const int nx = counts[0], ny = counts[1];
    const int ix = static_cast<int>(index % nx);
    const int iy = static_cast<int>((index / nx) % ny);
    const int iz = static_cast<int>(index / (static_cast<std::size_t>(nx) * ny));
    Point p;
    p.dim = dim();
    p.x = coordinate(lo.x, hi.x, nx, ix);
    p.y = coordinate(lo.y, hi.y, ny, iy);
    p.z = dim() == 3 ? coordinate(lo.z, hi.z, counts[2], iz) : 0.0;
    return p;
  }
};

inline Lattice make_lattice(const Point& lo, const Point& hi, std::array<int, 3> counts) {
  require_same_dim(lo.dim, hi.dim, "make_lattice");
  for (int a = 0; a < lo.dim; ++a)
    if (counts[a] < 1) throw std::invalid_argument("make_lattice: counts must be >= 1");
  if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z)
    throw std::invalid_argument("make_lattice: lo must not exceed hi");
  return Lattice{lo, hi, counts};
}

// ------------------------------------------------------------------- scans ----

struct ScanOptions {
  double noise_delta = 0.0;      // relative spectral-norm noise level
  std::uint64_t noise_seed = 0;  // per-observation streams use seed + index
  bool complex_noise = false;
  double eigenvalue_floor_rel = kEigenvalueFloorRel;
  double smoothing_eps = 0.0;  // > 0: use smoothed far test vectors
  // Lattice points closer than this to a sensor get W = 0 instead of a
  // singular test vector (the sensor pixel itself carries no information).
  double sensor_exclusion = 1e-6;
};

struct IndicatorMeta {
  TestVectorKind kind = TestVectorKind::kFar;
  std::vector<Point> observations;  // directions (far) or sensor positions (near)
  int truncation = 0;
  double noise_delta = 0.0;
  std::uint64_t noise_seed = 0;
  double t_min = 0.0;
  double t_max = 0.0;
  double eigenvalue_floor_rel = kEigenvalueFloorRel;
  std::size_t excluded_points = 0;
};

struct IndicatorField {
  Lattice lattice;
  std::vector<double> values;  // W per lattice point, >= 0
  IndicatorMeta meta;

  // Max-normalized copy for plotting.
  std::vector<double> normalized() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    std::vector<double> out(values.size(), 0.0);
    if (m > 0.0)
      for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / m;
    return out;
  }
};

namespace detail {

struct PreparedObservation {
  spectral::OperatorSpectrum spectrum;
  Point provenance;
  double floor_abs = 0.0;
};

template <typename Record>
std::vector<PreparedObservation> prepare(const std::vector<Record>& records,
                                         const spectral::FrequencyGrid& grid,
                                         const ScanOptions& opt) {
  if (records.empty()) throw std::invalid_argument("scan: need at least one record");
  std::vector<PreparedObservation> prepared;
  prepared.reserve(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) {
    spectral::OperatorMatrix op;
    if constexpr (std::is_same_v<Record, forward::NearFieldRecord>)
      op = spectral::assemble_near_operator(records[j], grid);
    else
      op = spectral::assemble_far_operator(records[j], grid);
    if (opt.noise_delta > 0.0)
      op = spectral::add_noise(op, opt.noise_delta, opt.noise_seed + j, opt.complex_noise);
    PreparedObservation p;
    p.spectrum = spectral::eigensystem(spectral::sharp_operator(op.entries));
    p.provenance = op.provenance;
    const double lam1 = p.spectrum.eigenvalues.size() ? p.spectrum.eigenvalues[0] : 0.0;
    // Noise-matched spectral cutoff on top of the numerical floor.
    p.floor_abs = std::max(opt.eigenvalue_floor_rel, opt.noise_delta) * lam1;
    p.floor_abs = std::max(p.floor_abs, 1e-300);
    prepared.push_back(std::move(p));
  }
  return prepared;
}

}  // namespace detail

// Multi-direction far-field indicator over a lattice: harmonic combination of
// per-direction Picard sums,  1/W(y) = sum_j 1/W^{(j)}(y).
inline IndicatorField scan_hull(const std::vector<forward::FarFieldRecord>& records,
                                const spectral::FrequencyGrid& grid, const Lattice& lattice,
                                double t_min, double t_max, int truncation,
                                const ScanOptions& opt = {}) {
  if (lattice.size() == 0) throw std::invalid_argument("scan: empty lattice");
  auto prepared = detail::prepare(records, grid, opt);
  IndicatorField field;
  field.lattice = lattice;
  field.values.resize(lattice.size());
  field.meta.kind =
      opt.smoothing_eps > 0.0 ? TestVectorKind::kFarSmoothed : TestVectorKind::kFar;
  for (const auto& rec : records) field.meta.observations.push_back(rec.direction);
  field.meta.truncation = truncation;
  field.meta.noise_delta = opt.noise_delta;
  field.meta.noise_seed = opt.noise_seed;
  field.meta.t_min = t_min;
  field.meta.t_max = t_max;
  field.meta.eigenvalue_floor_rel = opt.eigenvalue_floor_rel;
  if (truncation < 1 || truncation > grid.n())
    throw std::invalid_argument("scan: truncation out of range");

  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Point y = lattice.point(i);
    double inv = 0.0;
    for (std::size_t j = 0; j < prepared.size(); ++j) {
      TestVector phi =
          opt.smoothing_eps > 0.0
              ? smoothed_far_test_vector(y, records[j].direction, grid, t_min, t_max,
                                         opt.smoothing_eps)
              : far_test_vector(y, records[j].direction, grid, t_min, t_max);
      inv += detail::picard_inverse_sum(prepared[j].spectrum, phi.values, truncation,
                                        prepared[j].floor_abs);
    }
    field.values[i] = inv > 0.0 ? 1.0 / inv : 0.0;
  }
  return field;
}

// Single-direction strip indicator; identical to scan_hull with one record.
inline IndicatorField scan_strip(const forward::FarFieldRecord& record,
                                 const spectral::FrequencyGrid& grid, const Lattice& lattice,
                                 double t_min, double t_max, int truncation,
                                 const ScanOptions& opt = {}) {
  return scan_hull(std::vector<forward::FarFieldRecord>{record}, grid, lattice, t_min, t_max,
                   truncation, opt);
}

// Near-field indicator for one or several sensors (3-D).
inline IndicatorField scan_annulus(const std::vector<forward::NearFieldRecord>& records,
                                   const spectral::FrequencyGrid& grid, const Lattice& lattice,
                                   double t_min, double t_max, int truncation,
                                   const ScanOptions& opt = {}) {
  if (lattice.size() == 0) throw std::invalid_argument("scan: empty lattice");
  if (lattice.dim() != 3) throw std::invalid_argument("scan_annulus: 3-D lattices only");
  auto prepared = detail::prepare(records, grid, opt);
  IndicatorField field;
  field.lattice = lattice;
  field.values.resize(lattice.size());
  field.meta.kind = TestVectorKind::kNear;
  for (const auto& rec : records) field.meta.observations.push_back(rec.point);
  field.meta.truncation = truncation;
  field.meta.noise_delta = opt.noise_delta;
  field.meta.noise_seed = opt.noise_seed;
  field.meta.t_min = t_min;
  field.meta.t_max = t_max;
  field.meta.eigenvalue_floor_rel = opt.eigenvalue_floor_rel;
  if (truncation < 1 || truncation > grid.n())
    throw std::invalid_argument("scan: truncation out of range");

  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Point y = lattice.point(i);
    double inv = 0.0;
    bool excluded = false;
    for (std::size_t j = 0; j < prepared.size(); ++j) {
      const double r = distance(records[j].point, y);
      if (r < opt.sensor_exclusion) {
        excluded = true;
        break;
      }
      const TestVector phi = near_test_vector_from_distance(r, grid, t_min, t_max);
      inv += detail::picard_inverse_sum(prepared[j].spectrum, phi.values, truncation,
                                        prepared[j].floor_abs);
    }
    if (excluded) {
      field.values[i] = 0.0;
      ++field.meta.excluded_points;
      continue;
    }
    field.values[i] = inv > 0.0 ? 1.0 / inv : 0.0;
  }
  return field;
}

inline IndicatorField scan_annulus(const forward::NearFieldRecord& record,
                                   const spectral::FrequencyGrid& grid, const Lattice& lattice,
                                   double t_min, double t_max, int truncation,
                                   const ScanOptions& opt = {}) {
  return scan_annulus(std::vector<forward::NearFieldRecord>{record}, grid, lattice, t_min,
                      t_max, truncation, opt);
}

}  // namespace mfsi::indicator
