#pragma once

#include <span>
#include <vector>

#include "fdsim/pauli.hpp"
#include "fdsim/zassenhaus.hpp"

namespace fdsim {

inline constexpr int kZassenhausQubitCap = 6;
inline constexpr int kSpectralNormDimCap = 4096;
/// Errors below this are at the double-precision floor and excluded from fits.
inline constexpr double kSaturationFloor = 1e-14;

/// Cached eigendecomposition H = V diag(lambda) V^dagger for repeated
/// evaluation of exp(-iHt).
class HermitianExponential {
 public:
  explicit HermitianExponential(const DenseMatrix& h);
  explicit HermitianExponential(const AlgebraElement& h);

  /// exp(-i H t).
  DenseMatrix operator()(double t) const;
  const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }

 private:
  Eigen::VectorXd values_;
  DenseMatrix vectors_;
};

/// exp(-iHt) by Hermitian eigendecomposition.
DenseMatrix expm_hermitian(const AlgebraElement& h, double t);
DenseMatrix expm_hermitian(const DenseMatrix& h, double t);

/// Largest singular value, sqrt(lambda_max(M^dagger M)).
double spectral_norm(const DenseMatrix& m);

/// max |(U^dagger U - I)_ij|.
double unitarity_defect(const DenseMatrix& u);

/// exp(-i h0 t) as a product of closed-form per-string exponentials. Throws
/// ContractError unless the strings of h0 commute pairwise.
DenseMatrix commuting_exponential(const AlgebraElement& h0, double t);

/// K^dagger exp(-i h0 t) K.
DenseMatrix fixed_depth_evolution(const DenseMatrix& k_c, const AlgebraElement& h0, double t);

struct ErrorRow {
  double t = 0.0;
  double err = 0.0;
};

using ErrorCurve = std::vector<ErrorRow>;

/// ||exp(-iHt) - K^dagger exp(-i h0 t) K||_2 for each t, in grid order.
ErrorCurve error_curve(const AlgebraElement& h, const DenseMatrix& k_c, const AlgebraElement& h0,
                       std::span<const double> t_grid);

/// `points` uniform samples on [0, t_max] (points >= 2).
std::vector<double> uniform_grid(double t_max, int points);
/// `points` log-uniform samples on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int points);

/// e^{sA'} e^{sB'} prod_{k=2..order} e^{W_k(sA', sB')} with A' = iA, B' = iB.
/// Approximates exp(is(A + B)) = expm_hermitian(A + B, -s).
DenseMatrix zassenhaus_product(const AlgebraElement& a, const AlgebraElement& b, int order,
                               double scale,
                               CoefficientConvention conv = CoefficientConvention::standard);

struct SlopeReport {
  int order = 0;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
  bool saturated = false;
  std::vector<double> s;
  std::vector<double> errors;
};

/// Least-squares fit of log(err) on log(x) over points with err above the
/// saturation floor. Saturated when fewer than two points remain.
SlopeReport fit_log_log(std::span<const double> x, std::span<const double> err);

/// Fitted slope of ||exp(is(A+B)) - zassenhaus_product(A, B, order, s)||_2.
SlopeReport truncation_slope(const AlgebraElement& a, const AlgebraElement& b, int order,
                             std::span<const double> s_grid,
                             CoefficientConvention conv = CoefficientConvention::standard);

/// Uncorrected: (e^{-iAt/m} e^{-iBt/m})^m. Corrected appends
/// e^{i t^2 ⟦A,B⟧ / (2m^2)} (= e^{t^2 [A,B] / (2m^2)}) to every step.
DenseMatrix trotter_step(const AlgebraElement& a, const AlgebraElement& b, double t, int m,
                         bool corrected);

struct TrotterSweep {
  double t = 0.0;
  std::vector<int> steps;
  std::vector<double> err_uncorrected;
  std::vector<double> err_corrected;
  /// Slopes of log(err) against log(m); about -1 and -2.
  SlopeReport fit_uncorrected;
  SlopeReport fit_corrected;
};

TrotterSweep trotter_sweep(const AlgebraElement& a, const AlgebraElement& b, double t,
                           std::span<const int> steps);

}  // namespace fdsim
