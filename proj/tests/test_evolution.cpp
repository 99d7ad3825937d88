#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fdsim/error.hpp"
#include "fdsim/evolution.hpp"
#include "fdsim/lie.hpp"
#include "fdsim/models.hpp"
#include "oracle.hpp"

using namespace fdsim;

namespace {

const oracle::C kI(0.0, 1.0);

AlgebraElement element(std::vector<std::pair<std::string, double>> terms) {
  return AlgebraElement::from_labels(terms);
}

oracle::M random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  oracle::M m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = oracle::C(d(rng), d(rng));
  }
  return m;
}

oracle::M random_unitary(int dim, std::mt19937_64& rng) {
  const oracle::M a = random_matrix(dim, rng);
  return oracle::expm(kI * (a + a.adjoint()));
}

oracle::M exact(const std::vector<std::pair<std::string, double>>& terms, int n, double t) {
  return oracle::expm(-kI * t * oracle::sum_matrix(terms, n));
}

const auto kX = std::vector<std::pair<std::string, double>>{{"X", 1.0}};
const auto kZ = std::vector<std::pair<std::string, double>>{{"Z", 1.0}};

}  // namespace

TEST(ExpmHermitian, DiagonalCase) {
  const double t = 0.83;
  const DenseMatrix u = expm_hermitian(element(kZ), t);
  EXPECT_LT(std::abs(u(0, 0) - std::exp(-kI * t)), 1e-14);
  EXPECT_LT(std::abs(u(1, 1) - std::exp(kI * t)), 1e-14);
  EXPECT_LT(std::abs(u(0, 1)), 1e-14);
}

TEST(ExpmHermitian, ZeroTimeAndHalfPiRotation) {
  EXPECT_LT(oracle::max_abs(expm_hermitian(element(kX), 0.0) - oracle::M::Identity(2, 2)), 1e-15);
  const DenseMatrix u = expm_hermitian(element(kX), std::numbers::pi / 2);
  EXPECT_LT(oracle::max_abs(u + kI * oracle::label_matrix("X")), 1e-14);
}

TEST(ExpmHermitian, MatchesTaylorOracle) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 4}) {
    const auto terms = oracle::random_terms(n, 6, rng);
    for (double t : {0.1, 1.0, 7.5}) {
      const DenseMatrix u = expm_hermitian(element(terms), t);
      EXPECT_LT(oracle::max_abs(u - exact(terms, n, t)), 1e-10) << n << " " << t;
      EXPECT_LT(unitarity_defect(u), 1e-10);
    }
  }
}

TEST(ExpmHermitian, CachedEvaluatorAgrees) {
  std::mt19937_64 rng(12);
  const auto terms = oracle::random_terms(3, 5, rng);
  const HermitianExponential e(element(terms));
  for (double t : {0.0, 0.5, 3.0}) {
    EXPECT_LT(oracle::max_abs(e(t) - expm_hermitian(element(terms), t)), 1e-13);
  }
}

TEST(SpectralNorm, Examples) {
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  EXPECT_NEAR(spectral_norm(d), 4.0, 1e-12);
  std::mt19937_64 rng(9);
  EXPECT_NEAR(spectral_norm(random_unitary(8, rng)), 1.0, 1e-10);
}

TEST(SpectralNorm, MatchesPowerIteration) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::M m = random_matrix(8, rng);
    const double ref = oracle::power_norm(m);
    EXPECT_NEAR(spectral_norm(m), ref, 1e-8 * ref);
  }
}

TEST(SpectralNorm, UnitaryInvariance) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::M m = random_matrix(8, rng);
    const oracle::M u = random_unitary(8, rng);
    const oracle::M v = random_unitary(8, rng);
    EXPECT_NEAR(spectral_norm(u * m * v), spectral_norm(m), 1e-9);
  }
}

TEST(SpectralNorm, RejectsNonSquare) {
  EXPECT_THROW(spectral_norm(DenseMatrix::Zero(2, 3)), Error);
}

TEST(CommutingExponential, MatchesDenseForCommutingSum) {
  const std::vector<std::pair<std::string, double>> terms = {{"ZZI", 0.7}, {"IZZ", -0.4}, {"XXX", 1.3}};
  for (double t : {0.0, 0.3, 4.0}) {
    const DenseMatrix u = commuting_exponential(element(terms), t);
    EXPECT_LT(oracle::max_abs(u - exact(terms, 3, t)), 1e-10);
  }
}

TEST(CommutingExponential, NonCommutingIsContractError) {
  EXPECT_THROW(commuting_exponential(element({{"XI", 1.0}, {"ZI", 1.0}}), 0.5), ContractError);
  EXPECT_THROW(fixed_depth_evolution(DenseMatrix::Identity(4, 4),
                                     element({{"XI", 1.0}, {"ZI", 1.0}}), 0.5),
               ContractError);
}

TEST(FixedDepthEvolution, SingleStringClosedForm) {
  std::mt19937_64 rng(14);
  const oracle::M k = random_unitary(4, rng);
  const double c = 0.6;
  const double t = 1.7;
  const DenseMatrix u = fixed_depth_evolution(k, element({{"XY", c}}), t);
  const oracle::M inner = std::cos(c * t) * oracle::M::Identity(4, 4) -
                          kI * std::sin(c * t) * oracle::label_matrix("XY");
  EXPECT_LT(oracle::max_abs(u - k.adjoint() * inner * k), 1e-12);
  EXPECT_LT(oracle::max_abs(fixed_depth_evolution(k, element({{"XY", c}}), 0.0) -
                            oracle::M::Identity(4, 4)),
            1e-12);
}

TEST(ErrorCurve, ExactDecompositionIsAtRoundoff) {
  // H = K^dagger h0 K for a chosen unitary K built from k-type rotations.
  const std::vector<std::pair<std::string, double>> h0_terms = {{"ZI", 0.8}, {"IZ", -0.3}};
  const AlgebraElement h0 = element(h0_terms);
  const oracle::M k = oracle::expm(kI * 0.4 * oracle::label_matrix("XY")) *
                      oracle::expm(kI * -0.9 * oracle::label_matrix("YX"));
  const oracle::M hd = k.adjoint() * oracle::sum_matrix(h0_terms, 2) * k;
  std::vector<std::pair<std::string, double>> h_terms;
  for (const auto& l : oracle::all_labels(2)) {
    const double c = (oracle::label_matrix(l) * hd).trace().real() / 4.0;
    if (std::abs(c) > 1e-15) h_terms.emplace_back(l, c);
  }
  const auto grid = uniform_grid(200.0, 11);
  const ErrorCurve curve = error_curve(element(h_terms), k, h0, grid);
  ASSERT_EQ(curve.size(), grid.size());
  EXPECT_LE(curve.front().err, 1e-12);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].t, grid[i]);
    EXPECT_LE(curve[i].err, 1e-10);
  }
  const ErrorCurve again = error_curve(element(h_terms), k, h0, grid);
  for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_EQ(curve[i].err, again[i].err);
}

TEST(Grids, UniformAndGeometric) {
  const auto u = uniform_grid(200.0, 101);
  ASSERT_EQ(u.size(), 101u);
  EXPECT_EQ(u.front(), 0.0);
  EXPECT_EQ(u.back(), 200.0);
  EXPECT_NEAR(u[10], 20.0, 1e-12);
  EXPECT_THROW(uniform_grid(1.0, 1), ArgumentError);
  const auto g = geometric_grid(1e-3, 1e-1, 7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_NEAR(g.front(), 1e-3, 1e-18);
  EXPECT_NEAR(g.back(), 1e-1, 1e-15);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 1.0 / 3.0), 1e-12);
}

TEST(ZassenhausProduct, CommutingPairIsExact) {
  const auto a = element({{"ZI", 0.7}});
  const auto b = element({{"IZ", -1.2}, {"ZZ", 0.4}});
  for (int order = 1; order <= 4; ++order) {
    const DenseMatrix u = zassenhaus_product(a, b, order, 0.9);
    EXPECT_LT(oracle::max_abs(u - exact({{"ZI", 0.7}, {"IZ", -1.2}, {"ZZ", 0.4}}, 2, -0.9)), 1e-12);
  }
}

TEST(ZassenhausProduct, ZeroScaleIsIdentity) {
  for (int order = 1; order <= 4; ++order) {
    const DenseMatrix u = zassenhaus_product(element(kX), element(kZ), order, 0.0);
    EXPECT_LT(oracle::max_abs(u - oracle::M::Identity(2, 2)), 1e-15);
  }
  EXPECT_THROW(zassenhaus_product(element(kX), element(kZ), 5, 0.1), ArgumentError);
}

TEST(ZassenhausProduct, SecondOrderLocalError) {
  // e^{is(X+Z)} against the order-2 product: error / s^3 is an O(1) constant.
  for (double s : {1e-2, 2e-2}) {
    const DenseMatrix u = zassenhaus_product(element(kX), element(kZ), 2, s);
    const double err = spectral_norm(u - exact({{"X", 1.0}, {"Z", 1.0}}, 1, -s));
    EXPECT_GT(err / std::pow(s, 3), 0.1);
    EXPECT_LT(err / std::pow(s, 3), 10.0);
  }
}

TEST(TruncationSlope, OrderHierarchyOnXZ) {
  const auto grid = geometric_grid(1e-3, 1e-1, 7);
  double previous = 0.0;
  for (int order = 1; order <= 4; ++order) {
    const SlopeReport r = truncation_slope(element(kX), element(kZ), order, grid);
    EXPECT_FALSE(r.saturated);
    EXPECT_NEAR(r.slope, order + 1.0, 0.25) << order;
    EXPECT_GE(r.slope, previous + 0.6) << order;
    previous = r.slope;
  }
}

TEST(TruncationSlope, PrintedThirdOrderCoefficientsStallAtThree) {
  // The alternative third-order weights leave a degree-3 term uncancelled.
  const auto grid = geometric_grid(1e-3, 1e-1, 7);
  const SlopeReport r = truncation_slope(element(kX), element(kZ), 3, grid,
                                         CoefficientConvention::printed);
  EXPECT_LT(r.slope, 3.5);
}

TEST(TruncationSlope, CommutingPairSaturates) {
  const auto grid = geometric_grid(1e-3, 1e-1, 7);
  const SlopeReport r = truncation_slope(element({{"ZI", 1.0}}), element({{"IZ", 1.0}}), 2, grid);
  EXPECT_TRUE(r.saturated);
}

TEST(TruncationSlope, GridPreconditions) {
  const auto short_grid = geometric_grid(1e-3, 1e-1, 4);
  EXPECT_THROW(truncation_slope(element(kX), element(kZ), 2, short_grid), ArgumentError);
  const auto wide = geometric_grid(1e-5, 1e-1, 7);
  EXPECT_THROW(truncation_slope(element(kX), element(kZ), 2, wide), ArgumentError);
}

TEST(FitLogLog, RecoversPowerLaw) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 1; i <= 6; ++i) {
    x.push_back(i * 0.1);
    y.push_back(3.0 * std::pow(i * 0.1, 2.5));
  }
  const SlopeReport r = fit_log_log(x, y);
  EXPECT_NEAR(r.slope, 2.5, 1e-12);
  EXPECT_NEAR(std::exp(r.intercept), 3.0, 1e-12);
  EXPECT_EQ(r.points, 6);
  const std::vector<double> tiny(6, 1e-16);
  EXPECT_TRUE(fit_log_log(x, tiny).saturated);
}

TEST(Trotter, StepMatchesOracle) {
  const double t = 0.5;
  for (int m : {1, 3}) {
    const DenseMatrix u = trotter_step(element(kX), element(kZ), t, m, false);
    const oracle::M step = oracle::expm(-kI * (t / m) * oracle::label_matrix("X")) *
                           oracle::expm(-kI * (t / m) * oracle::label_matrix("Z"));
    oracle::M ref = oracle::M::Identity(2, 2);
    for (int k = 0; k < m; ++k) ref = ref * step;
    EXPECT_LT(oracle::max_abs(u - ref), 1e-13);
  }
  EXPECT_THROW(trotter_step(element(kX), element(kZ), t, 0, false), ArgumentError);
}

TEST(Trotter, CorrectedBeatsUncorrected) {
  for (double t : {0.1, 0.5}) {
    const oracle::M ref = exact({{"X", 1.0}, {"Z", 1.0}}, 1, t);
    for (int m : {1, 2, 4, 8, 16}) {
      const double plain = spectral_norm(trotter_step(element(kX), element(kZ), t, m, false) - ref);
      const double fixed = spectral_norm(trotter_step(element(kX), element(kZ), t, m, true) - ref);
      EXPECT_LT(fixed, plain) << t << " " << m;
    }
  }
}

TEST(Trotter, SweepSlopes) {
  const std::vector<int> steps = {1, 2, 4, 8, 16, 32, 64};
  const TrotterSweep s = trotter_sweep(element(kX), element(kZ), 0.5, steps);
  EXPECT_NEAR(s.fit_uncorrected.slope, -1.0, 0.3);
  EXPECT_NEAR(s.fit_corrected.slope, -2.0, 0.3);
  for (std::size_t i = 1; i < steps.size(); ++i) {
    EXPECT_LT(s.err_uncorrected[i], s.err_uncorrected[i - 1]);
  }
}

TEST(Trotter, CommutingPartsAreExact) {
  const auto a = element({{"ZI", 0.6}});
  const auto b = element({{"IZ", 0.9}});
  const oracle::M ref = exact({{"ZI", 0.6}, {"IZ", 0.9}}, 2, 0.7);
  for (int m : {1, 5}) {
    for (bool corrected : {false, true}) {
      EXPECT_LT(oracle::max_abs(trotter_step(a, b, 0.7, m, corrected) - ref), 1e-12);
    }
  }
}

TEST(Caps, ZassenhausAndTrotterQubitLimit) {
  const auto a = element({{"XIIIIII", 1.0}});
  const auto b = element({{"ZIIIIII", 1.0}});
  EXPECT_THROW(zassenhaus_product(a, b, 2, 0.1), ResourceError);
  EXPECT_THROW(trotter_step(a, b, 0.1, 1, false), ResourceError);
}
