#include "mfsi/validation.hpp"

#include <gtest/gtest.h>

using namespace mfsi;
using namespace mfsi::validation;
using mfsi::geometry::SupportDomain;
using mfsi::source::ConstantSpatial;
using mfsi::source::PolynomialTemporal;
using mfsi::source::QuadraticRadialSpatial;
using mfsi::source::SpaceTimeSource;
using mfsi::spectral::FrequencyGrid;

namespace {

FrequencyGrid paper_band() { return FrequencyGrid(0.0, 16 * kPi / 6, 16); }

// A symmetric dense record for support estimation: band +-band_factor * k_max,
// spacing dk/4 of the reference band.
forward::FarFieldRecord dense_record(const SpaceTimeSource& src,
                                     const geometry::QuadratureRule& quad,
                                     const Direction& dir, double band_factor) {
  const double dk = (kPi / 6) / 4.0;
  const int half = static_cast<int>(std::lround(band_factor * 16 * kPi / 6 / dk));
  forward::FarFieldRecord rec;
  rec.direction = dir;
  for (int j = -half; j <= half; ++j) rec.wavenumbers.push_back(j * dk);
  rec.values.resize(rec.wavenumbers.size());
  for (std::size_t i = 0; i < rec.wavenumbers.size(); ++i)
    rec.values[i] = forward::far_field(src, quad, dir, rec.wavenumbers[i]);
  return rec;
}

}  // namespace

TEST(Factorization, DiscreteIdentityHoldsWithMatchedQuadrature) {
  const FrequencyGrid grid = paper_band();
  SpaceTimeSource src(SupportDomain::kite(point2(0, 0), 1.0), ConstantSpatial{3.0},
                      PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  const auto quad = geometry::build_quadrature(src.support(), 48);
  const Rule1D trule = midpoint_rule(12, 0.0, 0.1);
  const Direction dir = direction_from_angle_pi(0.25);
  const auto fact = build_discrete_factorization(src, quad, trule, dir, grid);
  const auto rec = matched_far_record(src, quad, trule, dir, grid);
  const auto F = spectral::assemble_far_operator(rec, grid);
  EXPECT_LE(factorization_residual(F.entries, fact), 1e-8);

  // k_c = 0 with a positive source: the middle operator is real positive and
  // the rebuilt matrix Hermitian positive semidefinite.
  for (Eigen::Index i = 0; i < fact.Tmid.size(); ++i) {
    EXPECT_GT(fact.Tmid[i].real(), 0.0);
    EXPECT_EQ(fact.Tmid[i].imag(), 0.0);
  }
  EXPECT_LT((fact.F_rebuilt - fact.F_rebuilt.adjoint()).norm() / fact.F_rebuilt.norm(),
            1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fact.F_rebuilt);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
}

TEST(Factorization, GeneralBandIdentity) {
  // Bands bounded away from zero use the k_c-phase middle operator.
  const FrequencyGrid grid(2.0, 6.0, 8);
  SpaceTimeSource src(SupportDomain::ball(point2(0.2, -0.1), 0.6), ConstantSpatial{2.0},
                      PolynomialTemporal{{1.0, 0.5}}, 0.0, 0.5);
  const auto quad = geometry::build_quadrature(src.support(), 40);
  const Rule1D trule = midpoint_rule(10, 0.0, 0.5);
  const Direction dir = direction_from_angle_pi(0.7);
  const auto fact = build_discrete_factorization(src, quad, trule, dir, grid);
  const auto rec = matched_far_record(src, quad, trule, dir, grid);
  const auto F = spectral::assemble_far_operator(rec, grid);
  EXPECT_LE(factorization_residual(F.entries, fact), 1e-8);
}

TEST(Factorization, ZeroSourceAndMalformedRules) {
  const FrequencyGrid grid = paper_band();
  SpaceTimeSource zero(SupportDomain::kite(point2(0, 0), 1.0), ConstantSpatial{0.0},
                       PolynomialTemporal{{1.0}}, 0.0, 0.1);
  const auto quad = geometry::build_quadrature(zero.support(), 24);
  const Rule1D trule = midpoint_rule(8, 0.0, 0.1);
  const auto fact =
      build_discrete_factorization(zero, quad, trule, direction_from_angle_pi(0.0), grid);
  EXPECT_EQ(fact.F_rebuilt.norm(), 0.0);
  EXPECT_EQ(fact.Tmid.norm(), 0.0);

  // Time rule outside the radiating period is a configuration error.
  const Rule1D bad = midpoint_rule(8, 0.0, 0.3);
  EXPECT_THROW(
      build_discrete_factorization(zero, quad, bad, direction_from_angle_pi(0.0), grid),
      InvalidConfig);
}

TEST(Factorization, SharpIdentityForSignDefiniteSources) {
  const FrequencyGrid grid = paper_band();
  const Rule1D trule = midpoint_rule(12, 0.0, 0.1);
  // The identity |Re F| = L |Re Tmid| L* is exact precisely when the middle
  // operator is sign-definite, so both signs are exercised.
  SpaceTimeSource pos(SupportDomain::kite(point2(0, 0), 1.0), ConstantSpatial{3.0},
                      PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  SpaceTimeSource neg(SupportDomain::kite(point2(0, 0), 1.0),
                      QuadraticRadialSpatial{-3.0, -3.0}, PolynomialTemporal{{1.0, 1.0}},
                      0.0, 0.1);
  for (const auto* src : {&pos, &neg}) {
    const auto quad = geometry::build_quadrature(src->support(), 32);
    const auto fact = build_discrete_factorization(*src, quad, trule,
                                                   direction_from_angle_pi(0.25), grid);
    EXPECT_LE(sharp_factorization_residual(fact), 1e-6);
  }
}

TEST(RangeMembership, InsideOutsideContrast) {
  const FrequencyGrid grid = paper_band();
  SpaceTimeSource src(SupportDomain::kite(point2(0, 0), 1.0), ConstantSpatial{3.0},
                      PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  const auto quad = geometry::build_quadrature(src.support(), 48);
  const Rule1D trule = midpoint_rule(12, 0.0, 0.1);
  const Direction dir = direction_from_angle_pi(0.25);
  const auto fact = build_discrete_factorization(src, quad, trule, dir, grid);

  // Projections deep inside xhat . D (extent is about (-2.066, 0.925)).
  double worst_inside = 0.0;
  for (double p : {-1.5, -1.0, 0.0, 0.5}) {
    const auto phi = indicator::far_test_vector_from_projection(p, grid, 0.0, 0.1);
    worst_inside =
        std::max(worst_inside, range_membership_residual(fact.L, phi.values));
  }
  EXPECT_LT(worst_inside, 1e-3);

  // Projections at distance > 1 outside.
  double best_outside = 1.0;
  for (double p : {2.0, 2.5, -3.2}) {
    const auto phi = indicator::far_test_vector_from_projection(p, grid, 0.0, 0.1);
    best_outside = std::min(best_outside, range_membership_residual(fact.L, phi.values));
  }
  EXPECT_GT(best_outside, 10.0 * worst_inside);
}

TEST(RangeMembership, ExactMemberAndDegenerateInput) {
  const FrequencyGrid grid = paper_band();
  SpaceTimeSource src(SupportDomain::ball(point2(0, 0), 0.5), ConstantSpatial{1.0},
                      PolynomialTemporal{{1.0}}, 0.0, 0.1);
  const auto quad = geometry::build_quadrature(src.support(), 24);
  const Rule1D trule = midpoint_rule(8, 0.0, 0.1);
  const auto fact =
      build_discrete_factorization(src, quad, trule, point2(1, 0), grid);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(fact.L.cols());
  for (Eigen::Index i = 0; i < g.size(); i += 7) g[i] = cplx(0.3, -0.1);
  const Eigen::VectorXcd phi = fact.L * g;
  // phi = L g is in the range by construction; the ridge bound is tiny.
  EXPECT_LT(range_membership_residual(fact.L, phi), 1e-6);
  EXPECT_THROW(range_membership_residual(fact.L, Eigen::VectorXcd::Zero(fact.L.rows())),
               DegenerateInput);
}

TEST(SupportInterval, BallRecoversCorollaryInterval) {
  // Ball r = 0.5 at the origin radiating on (0, 0.1): the inverse transform of
  // the far field is supported in (-0.6, 0.5) and positive inside.
  SpaceTimeSource src(SupportDomain::ball(point3(0, 0, 0), 0.5), ConstantSpatial{3.0},
                      PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  const auto quad = geometry::ball_product_quadrature(point3(0, 0, 0), 0.5, 3, 24);
  const auto rec = dense_record(src, quad, point3(0, 0, 1), 8.0);
  const TimeProfile profile = inverse_transform_profile(rec, 0.1);
  const auto est = support_interval_estimate(rec, 0.002, 0.1);
  EXPECT_NEAR(est.lo, -0.6, profile.bin);
  EXPECT_NEAR(est.hi, 0.5, profile.bin);

  // Positivity of the reconstructed profile (ringing stays below 1% of peak).
  double peak = 0.0, low = 0.0;
  for (double v : profile.values) {
    peak = std::max(peak, std::abs(v));
    low = std::min(low, v);
  }
  EXPECT_GE(low, -0.01 * peak);
}

TEST(SupportInterval, SeparatedComponentsGiveTwoClusters) {
  const auto two = SupportDomain::union_of({SupportDomain::ball(point3(-3, 0, 0), 0.5),
                                            SupportDomain::ball(point3(3, 0, 0), 0.5)});
  SpaceTimeSource src(two, ConstantSpatial{3.0}, PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  const auto quad = geometry::build_quadrature(two, 48);
  const auto rec = dense_record(src, quad, point3(1, 0, 0), 8.0);
  const TimeProfile profile = inverse_transform_profile(rec, 0.1);
  const auto clusters = support_clusters(profile, 0.01);
  ASSERT_EQ(clusters.size(), 2u);
  // Components sit in (-3.6, -2.5) and (2.4, 3.5) along the axis.
  EXPECT_NEAR(clusters[0].lo, -3.6, 3 * profile.bin);
  EXPECT_NEAR(clusters[0].hi, -2.5, 3 * profile.bin);
  EXPECT_NEAR(clusters[1].lo, 2.4, 3 * profile.bin);
  EXPECT_NEAR(clusters[1].hi, 3.5, 3 * profile.bin);
}

TEST(SupportInterval, RefinementShrinksTowardTrueInterval) {
  SpaceTimeSource src(SupportDomain::ball(point3(0, 0, 0), 0.5), ConstantSpatial{3.0},
                      PolynomialTemporal{{1.0, 1.0}}, 0.0, 0.1);
  const auto quad = geometry::ball_product_quadrature(point3(0, 0, 0), 0.5, 3, 24);
  // Widening the band while lowering the threshold drives the estimate to the
  // true interval (-0.6, 0.5).
  double prev = std::numeric_limits<double>::infinity();
  const double thresholds[] = {0.02, 0.005, 0.00125};
  const double factors[] = {4.0, 8.0, 16.0};
  for (int i = 0; i < 3; ++i) {
    const auto rec = dense_record(src, quad, point3(0, 0, 1), factors[i]);
    const auto est = support_interval_estimate(rec, thresholds[i], 0.1);
    const double err = std::max(std::abs(est.lo + 0.6), std::abs(est.hi - 0.5));
    EXPECT_LT(err, prev);
    prev = err;
  }
  // Final error sits at roughly one bin of the widest band (the threshold
  // crossing of the quadratically vanishing profile edge limits it).
  EXPECT_LT(prev, 0.03);
}

TEST(SupportInterval, DegenerateAndMalformedInput) {
  std::vector<double> ks;
  std::vector<cplx> vals;
  for (int j = -16; j <= 16; ++j) {
    ks.push_back(0.25 * j);
    vals.push_back(0.0);
  }
  const TimeProfile zero = inverse_transform_profile(ks, vals, 0.1);
  EXPECT_THROW(support_clusters(zero, 0.02), DegenerateInput);

  std::vector<double> asym(ks.begin() + 1, ks.end());
  std::vector<cplx> av(vals.begin() + 1, vals.end());
  EXPECT_THROW(inverse_transform_profile(asym, av, 0.1), std::invalid_argument);
}
