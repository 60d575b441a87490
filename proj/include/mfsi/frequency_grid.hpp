#pragma once

// -----------------------------------------------------------------------------
// The wave-number band (k_min, k_max) with N operator nodes.
//
// For k_min = 0, conjugate symmetry w(-k) = conj(w(k)) extends the data to the
// symmetric band (-k_max, k_max); the effective central frequency is k_c = 0
// and the half-bandwidth is K = k_max, so dk = k_max / N.  For k_min > 0 the
// band is used as given: k_c = (k_min + k_max)/2, K = (k_max - k_min)/2.
//
// The discretized band operator lives on the grid tau_n = n dk, n = 1..N, for
// both its input and output variable, so its entries need data samples at the
// 2N-1 wave numbers k_c + j dk, j = -(N-1)..(N-1), all strictly inside the
// (extended) band.  On the symmetric path only the j >= 0 samples are computed;
// negative-j values are conjugates by construction.
// -----------------------------------------------------------------------------

#include <vector>

#include "mfsi/common.hpp"

namespace mfsi::spectral {

class FrequencyGrid {
 public:
  FrequencyGrid(double k_min, double k_max, int n) : k_min_(k_min), k_max_(k_max), n_(n) {
    if (k_min_ < 0.0 || !(k_max_ > k_min_))
      throw std::invalid_argument("FrequencyGrid: need 0 <= k_min < k_max");
    if (n_ < 1) throw std::invalid_argument("FrequencyGrid: need N >= 1");
  }

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  int n() const { return n_; }

  // True when the band starts at zero and is handled via conjugate extension.
  bool symmetric() const { return k_min_ == 0.0; }

  double half_bandwidth() const { return symmetric() ? k_max_ : 0.5 * (k_max_ - k_min_); }
  double center() const { return symmetric() ? 0.0 : 0.5 * (k_max_ + k_min_); }
  double dk() const { return half_bandwidth() / n_; }

  // Operator node tau_n = n dk, n = 1..N.
  double tau(int n) const { return n * dk(); }

  // All 2N-1 sample wave numbers k_c + j dk, ascending in j.
  std::vector<double> data_wavenumbers() const {
    std::vector<double> ks;
    ks.reserve(2 * n_ - 1);
    for (int j = -(n_ - 1); j <= n_ - 1; ++j) ks.push_back(center() + j * dk());
    return ks;
  }

 private:
  double k_min_;
  double k_max_;
  int n_;
};

}  // namespace mfsi::spectral
