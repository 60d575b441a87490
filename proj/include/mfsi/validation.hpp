#pragma once

// -----------------------------------------------------------------------------
// Independent oracles that verify the structural identities behind the
// reconstruction at the discrete level.
//
// 1. Discrete factorization.  With matched spatial and temporal quadrature,
//    the assembled band operator factors exactly as F = L Tmid L*, where
//
//      L(n, (q,r))   = sqrt(dk w_q w_r) e^{-i tau_n (xhat.y_q - t_r)}
//      Tmid((q,r))   = (1/sqrt(2 pi)) e^{-i k_c (xhat.y_q - t_r)} S(y_q, t_r)
//
//    (the sqrt weights split symmetrically so L* is the plain conjugate
//    transpose).  The Frobenius residual of that identity is the strongest
//    discrete tie to the factorization theorem.
//
// 2. Range membership.  A ridge-regularized least-squares residual
//    min_g ||L g - phi|| / ||phi|| probes phi in Range(L) without touching
//    the spectral pipeline (computed through the N x N Gram matrix L L*).
//
// 3. Support intervals.  The inverse Fourier transform of densely sampled
//    far-field data is supported in (inf(xhat.D) - t_max, sup(xhat.D) - t_min)
//    and is nonnegative for positive sources; a tapered discrete transform
//    estimates that interval by thresholding.
// -----------------------------------------------------------------------------

#include "mfsi/indicator.hpp"

namespace mfsi::validation {

// ---------------------------------------------------- discrete factorization ----

struct DiscreteFactorization {
  Eigen::MatrixXcd L;          // N x (Q*R)
  Eigen::VectorXcd Tmid;       // diagonal entries of the middle operator
  Eigen::MatrixXcd F_rebuilt;  // L * diag(Tmid) * L^*, formed on construction
};

inline DiscreteFactorization build_discrete_factorization(
    const source::SpaceTimeSource& src, const geometry::QuadratureRule& quad,
    const Rule1D& time_rule, const Direction& dir, const spectral::FrequencyGrid& grid) {
  require_unit(dir, "build_discrete_factorization");
  require_same_dim(src.support().dim(), dir.dim, "build_discrete_factorization");
  if (time_rule.nodes.empty() || time_rule.nodes.size() != time_rule.weights.size())
    throw InvalidConfig("build_discrete_factorization: malformed time rule");
  for (std::size_t r = 0; r < time_rule.nodes.size(); ++r) {
    if (time_rule.nodes[r] < src.t_min() || time_rule.nodes[r] > src.t_max() ||
        time_rule.weights[r] <= 0.0)
      throw InvalidConfig("build_discrete_factorization: time rule does not match the "
                          "radiating period");
  }
  const int n = grid.n();
  const std::size_t nq = quad.nodes.size(), nr = time_rule.nodes.size();
  const double kc = grid.center();

  DiscreteFactorization fact;
  fact.L.resize(n, static_cast<Eigen::Index>(nq * nr));
  fact.Tmid.resize(static_cast<Eigen::Index>(nq * nr));
  for (std::size_t q = 0; q < nq; ++q) {
    const double proj = dot(dir, quad.nodes[q]);
    const double a = src.spatial(quad.nodes[q]);
    for (std::size_t r = 0; r < nr; ++r) {
      const Eigen::Index col = static_cast<Eigen::Index>(q * nr + r);
      const double xi = proj - time_rule.nodes[r];
      const double w = std::sqrt(grid.dk() * quad.weights[q] * time_rule.weights[r]);
      for (int row = 1; row <= n; ++row)
        fact.L(row - 1, col) = w * std::exp(-kImag * (grid.tau(row) * xi));
      fact.Tmid[col] = std::exp(-kImag * (kc * xi)) *
                       (a * src.temporal(time_rule.nodes[r])) / kSqrt2Pi;
    }
  }
  fact.F_rebuilt = fact.L * fact.Tmid.asDiagonal() * fact.L.adjoint();
  return fact;
}

// The matched data record for the factorization identity: far-field values
// with the time integral evaluated on the same discrete rule.
inline forward::FarFieldRecord matched_far_record(const source::SpaceTimeSource& src,
                                                  const geometry::QuadratureRule& quad,
                                                  const Rule1D& time_rule,
                                                  const Direction& dir,
                                                  const spectral::FrequencyGrid& grid) {
  forward::FarFieldRecord rec;
  rec.direction = dir;
  rec.wavenumbers = grid.data_wavenumbers();
  rec.values.resize(rec.wavenumbers.size());
  for (std::size_t i = 0; i < rec.wavenumbers.size(); ++i)
    rec.values[i] =
        forward::far_field_discrete_time(src, quad, time_rule, dir, rec.wavenumbers[i]);
  return rec;
}

inline double factorization_residual(const Eigen::MatrixXcd& F_assembled,
                                     const DiscreteFactorization& fact) {
  const double denom = F_assembled.norm();
  if (denom == 0.0) return fact.F_rebuilt.norm() == 0.0 ? 0.0 : 1.0;
  return (F_assembled - fact.F_rebuilt).norm() / denom;
}

// || sharp(F_rebuilt) - L Tmid# L* || / || sharp(F_rebuilt) || with
// Tmid# = |Re Tmid| + |Im Tmid|.  Exact (up to roundoff) whenever the middle
// operator is sign-definite, e.g. k_c = 0 with a sign-definite source.
inline double sharp_factorization_residual(const DiscreteFactorization& fact) {
  Eigen::VectorXcd tsharp(fact.Tmid.size());
  for (Eigen::Index i = 0; i < fact.Tmid.size(); ++i)
    tsharp[i] = std::abs(fact.Tmid[i].real()) + std::abs(fact.Tmid[i].imag());
  const Eigen::MatrixXcd lhs = spectral::sharp_operator(fact.F_rebuilt);
  const Eigen::MatrixXcd rhs = fact.L * tsharp.asDiagonal() * fact.L.adjoint();
  return (lhs - rhs).norm() / lhs.norm();
}

// --------------------------------------------------------- range membership ----

// Relative ridge-regularized least-squares residual min_g ||L g - phi||/||phi||.
// ridge_rel scales the ridge against the largest eigenvalue of the Gram
// matrix G = L L*: the residual is || eps^2 (G + eps^2 I)^{-1} phi || / ||phi||
// with eps^2 = ridge_rel * lambda_max(G).
inline double range_membership_residual(const Eigen::MatrixXcd& L,
                                        const Eigen::VectorXcd& phi,
                                        double ridge_rel = 1e-8) {
  if (phi.norm() == 0.0)
    throw DegenerateInput("range_membership_residual: zero test vector");
  if (L.rows() != phi.size())
    throw std::invalid_argument("range_membership_residual: size mismatch");
  if (ridge_rel <= 0.0)
    throw std::invalid_argument("range_membership_residual: ridge must be positive");
  const Eigen::MatrixXcd G = L * L.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  if (es.info() != Eigen::Success)
    throw NumericFailure("range_membership_residual: eigendecomposition failed");
  const double eps2 = ridge_rel * std::max(es.eigenvalues().maxCoeff(), 0.0);
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * phi;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double lam = std::max(es.eigenvalues()[i], 0.0);
    const double factor = eps2 / (lam + eps2);
    acc += factor * factor * std::norm(coeffs[i]);
  }
  return std::sqrt(acc) / phi.norm();
}

// ---------------------------------------------------------- support interval ----

struct TimeProfile {
  std::vector<double> xi;      // time-lag grid
  std::vector<double> values;  // real part of the inverse transform
  double bin = 0.0;            // grid spacing 2 pi / (n delta_k)
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Discrete inverse Fourier transform of a densely sampled symmetric record,
// with a raised-cosine taper on the outer fraction of the band to suppress
// truncation ringing.
inline TimeProfile inverse_transform_profile(const std::vector<double>& ks,
                                             const std::vector<cplx>& values,
                                             double taper_fraction = 0.1) {
  const std::size_t n = ks.size();
  if (n < 8 || values.size() != n)
    throw std::invalid_argument("inverse_transform_profile: malformed record");
  const double dk = ks[1] - ks[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(ks[i] - ks[i - 1] - dk) > 1e-9 * std::max(1.0, std::abs(dk)))
      throw std::invalid_argument("inverse_transform_profile: nonuniform sampling");
  if (std::abs(ks.front() + ks.back()) > 1e-9)
    throw std::invalid_argument("inverse_transform_profile: band must be symmetric");
  const double k_hi = ks.back();

  TimeProfile profile;
  profile.bin = 2.0 * kPi / (n * dk);
  const double span = kPi / dk;  // half the Nyquist period
  const std::size_t m = n;
  profile.xi.resize(m);
  profile.values.resize(m);
  const double flat = (1.0 - taper_fraction) * k_hi;
  std::vector<double> window(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(ks[j]);
    window[j] = a <= flat ? 1.0
                          : 0.5 * (1.0 + std::cos(kPi * (a - flat) /
                                                  std::max(1e-300, k_hi - flat)));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = -span + 2.0 * span * i / m;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += window[j] * values[j] * std::exp(kImag * (ks[j] * xi));
    profile.xi[i] = xi;
    profile.values[i] = (acc * dk / kSqrt2Pi).real();
  }
  return profile;
}

inline TimeProfile inverse_transform_profile(const forward::FarFieldRecord& record,
                                             double taper_fraction = 0.1) {
  return inverse_transform_profile(record.wavenumbers, record.values, taper_fraction);
}

// Contiguous runs of |profile| above threshold * max |profile|.
inline std::vector<Interval> support_clusters(const TimeProfile& profile, double threshold) {
  double peak = 0.0;
  for (double v : profile.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw DegenerateInput("support_clusters: all-zero profile");
  const double level = threshold * peak;
  std::vector<Interval> clusters;
  bool open = false;
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    if (std::abs(profile.values[i]) >= level) {
      if (!open) {
        clusters.push_back({profile.xi[i], profile.xi[i]});
        open = true;
      } else {
        clusters.back().hi = profile.xi[i];
      }
    } else {
      open = false;
    }
  }
  return clusters;
}

// Smallest interval containing everything above threshold * peak.
inline Interval support_interval_estimate(const forward::FarFieldRecord& record,
                                          double threshold = 0.02,
                                          double taper_fraction = 0.1) {
  const TimeProfile profile = inverse_transform_profile(record, taper_fraction);
  const auto clusters = support_clusters(profile, threshold);
  return {clusters.front().lo, clusters.back().hi};
}

}  // namespace mfsi::validation
