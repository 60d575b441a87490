#pragma once

// -----------------------------------------------------------------------------
// Forward data synthesis: multi-frequency far-field and near-field values
// radiated by a space-time source, plus the time-domain retarded-potential
// signal used as an independent cross-check.
//
//   far field    w_inf(xhat, k) = integral_D e^{-i k xhat . y} f(y, k) dy
//   near field   w(x, k)        = integral_D e^{i k |x-y|} / (4 pi |x-y|) f(y, k) dy
//   time domain  U(x, t)        = (1/4 pi) integral_D S(y, t - |x-y|) / |x-y| dy
//
// Spatial integrals are evaluated on a caller-supplied quadrature rule.  The
// 2-D far field uses the same phase integral as the 3-D one; the 2-D Hankel
// normalization constant rescales the band operator and its factorization
// consistently, so it is irrelevant to the range criterion and omitted (a
// normalization convention, not an approximation).  Near-field and
// time-domain values exist in 3-D only, where the sharp Huygens time support
// holds.
//
// Conjugate symmetry w(-k) = conj(w(k)) of real-source data is enforced
// exactly: negative wave numbers are evaluated as conjugates.
// -----------------------------------------------------------------------------

#include "mfsi/frequency_grid.hpp"
#include "mfsi/geometry.hpp"
#include "mfsi/source.hpp"

namespace mfsi::forward {

struct FarFieldRecord {
  Direction direction;
  std::vector<double> wavenumbers;  // ascending
  std::vector<cplx> values;         // aligned with wavenumbers
};

struct NearFieldRecord {
  Point point;
  std::vector<double> wavenumbers;
  std::vector<cplx> values;
};

namespace detail {

// sum_q w_q a(y_q) e^{-i k xhat . y_q}  (the separable spatial phase sum).
inline cplx far_phase_sum(const source::SpaceTimeSource& src,
                          const geometry::QuadratureRule& quad, const Direction& dir,
                          double k) {
  cplx acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double phase = -k * dot(dir, quad.nodes[q]);
    acc += quad.weights[q] * src.spatial(quad.nodes[q]) *
           cplx(std::cos(phase), std::sin(phase));
  }
  return acc;
}

inline cplx near_kernel_sum(const source::SpaceTimeSource& src,
                            const geometry::QuadratureRule& quad, const Point& x,
                            double k) {
  cplx acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double r = distance(x, quad.nodes[q]);
    if (r < 1e-12) throw InvalidGeometry("near_field: observation point touches a node");
    const double phase = k * r;
    acc += quad.weights[q] * src.spatial(quad.nodes[q]) *
           cplx(std::cos(phase), std::sin(phase)) / (4.0 * kPi * r);
  }
  return acc;
}

inline void require_exterior_3d(const source::SpaceTimeSource& src, const Point& x,
                                const char* who) {
  if (src.support().dim() != 3 || x.dim != 3)
    throw std::invalid_argument(std::string(who) + ": 3-D only");
  if (src.support().contains(x))
    throw InvalidGeometry(std::string(who) + ": observation point lies inside the support");
}

}  // namespace detail

// Far-field pattern at one direction and wave number.
inline cplx far_field(const source::SpaceTimeSource& src, const geometry::QuadratureRule& quad,
                      const Direction& dir, double k) {
  require_unit(dir, "far_field");
  require_same_dim(src.support().dim(), dir.dim, "far_field");
  if (k < 0.0) return std::conj(far_field(src, quad, dir, -k));
  return src.temporal_transform(k) * detail::far_phase_sum(src, quad, dir, k);
}

// Same integral with the time integral replaced by a discrete rule, so the
// factorization identity can be checked with fully matched quadrature.
inline cplx far_field_discrete_time(const source::SpaceTimeSource& src,
                                    const geometry::QuadratureRule& quad,
                                    const Rule1D& time_rule, const Direction& dir, double k) {
  require_unit(dir, "far_field_discrete_time");
  require_same_dim(src.support().dim(), dir.dim, "far_field_discrete_time");
  cplx acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double proj = dot(dir, quad.nodes[q]);
    const double a = src.spatial(quad.nodes[q]);
    for (std::size_t r = 0; r < time_rule.nodes.size(); ++r) {
      const double phase = -k * (proj - time_rule.nodes[r]);
      acc += quad.weights[q] * time_rule.weights[r] * a * src.temporal(time_rule.nodes[r]) *
             cplx(std::cos(phase), std::sin(phase));
    }
  }
  return acc / kSqrt2Pi;
}

// Near-field value at an exterior observation point (3-D).
inline cplx near_field(const source::SpaceTimeSource& src, const geometry::QuadratureRule& quad,
                       const Point& x, double k) {
  detail::require_exterior_3d(src, x, "near_field");
  if (k < 0.0) return std::conj(near_field(src, quad, x, -k));
  return src.temporal_transform(k) * detail::near_kernel_sum(src, quad, x, k);
}

inline cplx near_field_discrete_time(const source::SpaceTimeSource& src,
                                     const geometry::QuadratureRule& quad,
                                     const Rule1D& time_rule, const Point& x, double k) {
  detail::require_exterior_3d(src, x, "near_field_discrete_time");
  cplx acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double r = distance(x, quad.nodes[q]);
    if (r < 1e-12) throw InvalidGeometry("near_field: observation point touches a node");
    const double a = src.spatial(quad.nodes[q]) / (4.0 * kPi * r);
    for (std::size_t j = 0; j < time_rule.nodes.size(); ++j) {
      const double phase = k * (r + time_rule.nodes[j]);
      acc += quad.weights[q] * time_rule.weights[j] * a * src.temporal(time_rule.nodes[j]) *
             cplx(std::cos(phase), std::sin(phase));
    }
  }
  return acc / kSqrt2Pi;
}

// Retarded potential U(x, t) at the requested times (3-D).  Retarded times
// falling outside [t_min, t_max] contribute zero, matching the compact
// support of S.
inline std::vector<double> time_domain_signal(const source::SpaceTimeSource& src,
                                              const geometry::QuadratureRule& quad,
                                              const Point& x,
                                              const std::vector<double>& times) {
  detail::require_exterior_3d(src, x, "time_domain_signal");
  const std::size_t nq = quad.nodes.size();
  std::vector<double> dist_q(nq), coeff_q(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = distance(x, quad.nodes[q]);
    if (r < 1e-12)
      throw InvalidGeometry("time_domain_signal: observation point touches a node");
    dist_q[q] = r;
    coeff_q[q] = quad.weights[q] * src.spatial(quad.nodes[q]) / (4.0 * kPi * r);
  }
  const double t0 = src.t_min(), t1 = src.t_max();
  std::vector<double> signal(times.size(), 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double acc = 0.0;
    const double t = times[i];
    for (std::size_t q = 0; q < nq; ++q) {
      const double s = t - dist_q[q];
      if (s >= t0 && s <= t1) acc += coeff_q[q] * src.temporal(s);
    }
    signal[i] = acc;
  }
  return signal;
}

// Band sampling.  On the symmetric (k_min = 0) path only the nonnegative
// sample wave numbers are evaluated; negative-k values are their conjugates
// by construction.
inline FarFieldRecord sample_far_band(const source::SpaceTimeSource& src,
                                      const geometry::QuadratureRule& quad,
                                      const Direction& dir,
                                      const spectral::FrequencyGrid& grid) {
  FarFieldRecord rec;
  rec.direction = dir;
  rec.wavenumbers = grid.data_wavenumbers();
  rec.values.resize(rec.wavenumbers.size());
  const int n = grid.n();
  if (grid.symmetric()) {
    // Index of j = 0 is n-1; fill j >= 0 and mirror.
    for (int j = 0; j <= n - 1; ++j) {
      const cplx v = far_field(src, quad, dir, rec.wavenumbers[n - 1 + j]);
      rec.values[n - 1 + j] = v;
      if (j > 0) rec.values[n - 1 - j] = std::conj(v);
    }
  } else {
    for (std::size_t i = 0; i < rec.wavenumbers.size(); ++i)
      rec.values[i] = far_field(src, quad, dir, rec.wavenumbers[i]);
  }
  return rec;
}

inline NearFieldRecord sample_near_band(const source::SpaceTimeSource& src,
                                        const geometry::QuadratureRule& quad, const Point& x,
                                        const spectral::FrequencyGrid& grid) {
  NearFieldRecord rec;
  rec.point = x;
  rec.wavenumbers = grid.data_wavenumbers();
  rec.values.resize(rec.wavenumbers.size());
  const int n = grid.n();
  if (grid.symmetric()) {
    for (int j = 0; j <= n - 1; ++j) {
      const cplx v = near_field(src, quad, x, rec.wavenumbers[n - 1 + j]);
      rec.values[n - 1 + j] = v;
      if (j > 0) rec.values[n - 1 - j] = std::conj(v);
    }
  } else {
    for (std::size_t i = 0; i < rec.wavenumbers.size(); ++i)
      rec.values[i] = near_field(src, quad, x, rec.wavenumbers[i]);
  }
  return rec;
}

}  // namespace mfsi::forward
