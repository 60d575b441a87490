#pragma once

// -----------------------------------------------------------------------------
// Discretization of the band operator built from multi-frequency data,
//
//   (F phi)(tau) = integral_0^K w(k_c + tau - s) phi(s) ds,   tau in (0, K),
//
// with w = far-field values at a fixed direction or near-field values at a
// fixed point.  Both variables live on the grid tau_n = n dk, n = 1..N, so
//
//   F(n, m) = w(k_c + (n - m) dk) * dk,
//
// a Toeplitz matrix needing the 2N-1 samples at k_c + j dk.  On the k_min = 0
// path (k_c = 0 after conjugate extension) the data symmetry w(-k) = conj w(k)
// makes the matrix exactly Hermitian, the discrete counterpart of the
// self-adjointness of the continuous operator on the extended band.
//
// F# = |Re F| + |Im F| is evaluated through two Hermitian eigendecompositions,
// which is exact for every matrix.  The spectral shortcut that reuses the
// eigenvectors of F itself (|Re lambda| + |Im lambda| on the shared basis) is
// available separately; it agrees with the exact form only for normal F, and
// the tests cross-check that.
//
// Noise pollutes the matrix as F + delta * ||F||_2 * M with M drawn uniformly
// from [-1, 1] entrywise (real by default, complex on request), reproducibly
// from a seed.
// -----------------------------------------------------------------------------

#include <Eigen/Dense>
#include <map>
#include <random>
#include <sstream>

#include "mfsi/forward.hpp"
#include "mfsi/frequency_grid.hpp"

namespace mfsi::spectral {

enum class OperatorKind { kFar, kNear };

struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  OperatorKind kind = OperatorKind::kFar;
  Point provenance;  // observation direction (far) or sensor position (near)
  double dk = 0.0;
};

namespace detail {

// Map each record wave number onto its integer offset j from the band center;
// throws if a required offset is missing, naming the absent wave numbers.
inline std::map<int, cplx> offset_table(const std::vector<double>& ks,
                                        const std::vector<cplx>& values,
                                        const FrequencyGrid& grid) {
  std::map<int, cplx> table;
  const double kc = grid.center(), dk = grid.dk();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double j_real = (ks[i] - kc) / dk;
    const int j = static_cast<int>(std::lround(j_real));
    if (std::abs(j_real - j) < 1e-6) table[j] = values[i];
  }
  std::ostringstream missing;
  for (int j = -(grid.n() - 1); j <= grid.n() - 1; ++j) {
    if (!table.count(j)) missing << " " << kc + j * dk;
  }
  if (!missing.str().empty())
    throw IncompleteRecord("record lacks required wave numbers:" + missing.str());
  return table;
}

inline Eigen::MatrixXcd assemble(const std::map<int, cplx>& table, const FrequencyGrid& grid) {
  const int n = grid.n();
  const double dk = grid.dk();
  Eigen::MatrixXcd F(n, n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) F(row, col) = table.at(row - col) * dk;
  return F;
}

}  // namespace detail

inline OperatorMatrix assemble_far_operator(const forward::FarFieldRecord& record,
                                            const FrequencyGrid& grid) {
  OperatorMatrix op;
  op.entries = detail::assemble(detail::offset_table(record.wavenumbers, record.values, grid),
                                grid);
  op.kind = OperatorKind::kFar;
  op.provenance = record.direction;
  op.dk = grid.dk();
  return op;
}

inline OperatorMatrix assemble_near_operator(const forward::NearFieldRecord& record,
                                             const FrequencyGrid& grid) {
  OperatorMatrix op;
  op.entries = detail::assemble(detail::offset_table(record.wavenumbers, record.values, grid),
                                grid);
  op.kind = OperatorKind::kNear;
  op.provenance = record.point;
  op.dk = grid.dk();
  return op;
}

namespace detail {

// Spectral absolute value of a Hermitian matrix.
inline Eigen::MatrixXcd hermitian_abs(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success)
    throw NumericFailure("hermitian eigendecomposition did not converge");
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace detail

// F# = |Re F| + |Im F| via two Hermitian eigendecompositions (exact for any F).
inline Eigen::MatrixXcd sharp_operator(const Eigen::MatrixXcd& F) {
  if (F.rows() != F.cols()) throw std::invalid_argument("sharp_operator: square matrix only");
  const Eigen::MatrixXcd re = 0.5 * (F + F.adjoint());
  const Eigen::MatrixXcd im = (F - F.adjoint()) / cplx(0.0, 2.0);
  return detail::hermitian_abs(re) + detail::hermitian_abs(im);
}

// The eigenbasis shortcut: |Re lambda| + |Im lambda| on the eigenvectors of F.
// Well-defined for diagonalizable F; equals sharp_operator only when F is
// normal.
inline Eigen::MatrixXcd sharp_operator_shortcut(const Eigen::MatrixXcd& F) {
  if (F.rows() != F.cols())
    throw std::invalid_argument("sharp_operator_shortcut: square matrix only");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(F);
  if (es.info() != Eigen::Success)
    throw NumericFailure("eigendecomposition did not converge");
  Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::VectorXcd sharp(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    sharp[i] = std::abs(lam[i].real()) + std::abs(lam[i].imag());
  return es.eigenvectors() * sharp.asDiagonal() * es.eigenvectors().inverse();
}

struct OperatorSpectrum {
  Eigen::VectorXd eigenvalues;    // descending, clamped at zero
  Eigen::MatrixXcd eigenvectors;  // orthonormal columns, aligned with eigenvalues
};

// Eigensystem of a Hermitian positive semidefinite matrix (F# or N#).
inline OperatorSpectrum eigensystem(const Eigen::MatrixXcd& F_sharp) {
  if (F_sharp.rows() != F_sharp.cols())
    throw std::invalid_argument("eigensystem: square matrix only");
  const double scale = std::max(1.0, F_sharp.norm());
  if ((F_sharp - F_sharp.adjoint()).norm() > 1e-8 * scale)
    throw std::invalid_argument("eigensystem: input is not Hermitian within 1e-8");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(F_sharp);
  if (es.info() != Eigen::Success)
    throw NumericFailure("eigendecomposition did not converge");
  const Eigen::VectorXd lam = es.eigenvalues();
  if (lam.size() > 0 && lam.minCoeff() < -1e-8 * std::max(1.0, lam.maxCoeff()))
    throw std::invalid_argument("eigensystem: input is not PSD within 1e-8");
  OperatorSpectrum spec;
  const Eigen::Index n = lam.size();
  spec.eigenvalues.resize(n);
  spec.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.eigenvalues[i] = std::max(0.0, lam[n - 1 - i]);
    spec.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return spec;
}

// Spectral norm ||A||_2 through the eigendecomposition of A* A.
inline double spectral_norm(const Eigen::MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.adjoint() * A);
  if (es.info() != Eigen::Success)
    throw NumericFailure("spectral_norm: eigendecomposition did not converge");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// F + delta * ||F||_2 * M with M uniform on [-1, 1] entrywise, drawn row-major
// from a seeded mt19937_64 (real part first, imaginary second when complex
// noise is requested).
inline OperatorMatrix add_noise(const OperatorMatrix& F, double delta, std::uint64_t seed,
                                bool complex_noise = false) {
  if (delta < 0.0) throw std::invalid_argument("add_noise: delta must be >= 0");
  OperatorMatrix out = F;
  if (delta == 0.0) return out;
  const double scale = delta * spectral_norm(F.entries);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // top 53 bits -> [0, 1) -> [-1, 1); standard-pinned generator output only
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  for (Eigen::Index i = 0; i < out.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < out.entries.cols(); ++j) {
      const double re = uniform();
      const double im = complex_noise ? uniform() : 0.0;
      out.entries(i, j) += scale * cplx(re, im);
    }
  return out;
}

}  // namespace mfsi::spectral
