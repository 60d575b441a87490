#pragma once

// -----------------------------------------------------------------------------
// Shared basics for the mfsi library: points that carry their spatial
// dimension (the code handles 2-D and 3-D side by side), the error taxonomy
// used across modules, and a few small numeric helpers (Gauss-Legendre rules,
// stable evaluation of the windowed phase integral).
//
// Everything in this library is a value type, immutable after construction,
// and safe to evaluate concurrently.
// -----------------------------------------------------------------------------

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfsi {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const double kSqrt2Pi = std::sqrt(2.0 * kPi);

using cplx = std::complex<double>;
inline constexpr cplx kImag{0.0, 1.0};

// ---------------------------------------------------------------- errors ----

// One exception class per failure mode named in the module contracts.
// Plain std::invalid_argument is used for bad arguments (dimension mismatch,
// non-unit directions, out-of-range truncation, ...).
#define MFSI_DEFINE_ERROR(Name)                                  \
  class Name : public std::runtime_error {                       \
   public:                                                       \
    explicit Name(const std::string& msg)                        \
        : std::runtime_error(std::string(#Name) + ": " + msg) {} \
  }

MFSI_DEFINE_ERROR(ResolutionTooCoarse);
MFSI_DEFINE_ERROR(InvalidConfig);
MFSI_DEFINE_ERROR(InvalidGeometry);
MFSI_DEFINE_ERROR(IncompleteRecord);
MFSI_DEFINE_ERROR(NumericFailure);
MFSI_DEFINE_ERROR(SingularTestPoint);
MFSI_DEFINE_ERROR(DegenerateInput);

#undef MFSI_DEFINE_ERROR

// ---------------------------------------------------------------- points ----

// A spatial point (or direction) that knows whether it lives in R^2 or R^3.
// 2-D points keep z == 0 so the arithmetic below works for both.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int dim = 3;
};

inline Point point2(double x, double y) { return {x, y, 0.0, 2}; }
inline Point point3(double x, double y, double z) { return {x, y, z, 3}; }

inline Point operator+(const Point& a, const Point& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z, a.dim};
}
inline Point operator-(const Point& a, const Point& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z, a.dim};
}
inline Point operator*(double s, const Point& a) {
  return {s * a.x, s * a.y, s * a.z, a.dim};
}

inline double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

using Direction = Point;

// Observation direction in the plane, angle given in units of pi (the
// convention used by experiment configs: 0.25 means pi/4).
inline Direction direction_from_angle_pi(double angle_over_pi) {
  const double t = angle_over_pi * kPi;
  return {std::cos(t), std::sin(t), 0.0, 2};
}

inline void require_unit(const Direction& d, const char* who) {
  if (std::abs(norm(d) - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": direction must be a unit vector");
}

inline void require_same_dim(int a, int b, const char* who) {
  if (a != b)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// -------------------------------------------------------- numeric helpers ----

inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// (1/T) * integral of e^{i k t} over (t0, t1), written in the cancellation-free
// midpoint-phase form  e^{i k (t0+t1)/2} * sinc(k T / 2).  Equals 1 at k = 0.
inline cplx unit_phase_window(double k, double t0, double t1) {
  const double mid = 0.5 * (t0 + t1);
  const double half = 0.5 * (t1 - t0);
  return std::exp(kImag * (k * mid)) * sinc(k * half);
}

// Nodes and weights of the n-point Gauss-Legendre rule on [a, b], computed by
// Newton iteration on the Legendre recurrence.  Accurate to machine precision
// for the node counts used here (up to a few thousand).
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule1D gauss_legendre_rule(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_rule: n must be >= 1");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n(x).
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[n - 1 - i] = w;
  }
  // Map from [-1, 1] to [a, b].
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = c - h * rule.nodes[i];
    rule.weights[i] *= h;
  }
  return rule;
}

// Midpoint rule on (a, b) with r nodes; positive weights, symmetric nodes.
inline Rule1D midpoint_rule(int r, double a, double b) {
  if (r < 1) throw std::invalid_argument("midpoint_rule: r must be >= 1");
  Rule1D rule;
  const double h = (b - a) / r;
  for (int i = 0; i < r; ++i) {
    rule.nodes.push_back(a + (i + 0.5) * h);
    rule.weights.push_back(h);
  }
  return rule;
}

}  // namespace mfsi
