#include "fdsim/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "fdsim/error.hpp"

namespace fdsim {

namespace {

void require_square(const DenseMatrix& m, const char* op) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(op) + ": matrix is not square");
}

void require_zassenhaus_cap(int n, const char* op) {
  if (n > kZassenhausQubitCap) {
    throw ResourceError(std::string(op) + ": " + std::to_string(n) + " qubits exceeds the cap of " +
                        std::to_string(kZassenhausQubitCap));
  }
}

bool pairwise_commuting(const AlgebraElement& e) {
  const auto& t = e.terms();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (!t[i].first.commutes_with(t[j].first)) return false;
    }
  }
  return true;
}

// exp(i * angle * M) for a real-weighted Pauli sum M.
DenseMatrix exp_i(const AlgebraElement& m, double angle) {
  if (pairwise_commuting(m)) return commuting_exponential(m, -angle);
  return expm_hermitian(m, -angle);
}

}  // namespace

HermitianExponential::HermitianExponential(const DenseMatrix& h) {
  require_square(h, "HermitianExponential");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

HermitianExponential::HermitianExponential(const AlgebraElement& h)
    : HermitianExponential(to_dense(h)) {}

DenseMatrix HermitianExponential::operator()(double t) const {
  Eigen::VectorXcd phases(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    phases(i) = std::polar(1.0, -values_(i) * t);
  }
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

DenseMatrix expm_hermitian(const AlgebraElement& h, double t) {
  return HermitianExponential(h)(t);
}

DenseMatrix expm_hermitian(const DenseMatrix& h, double t) { return HermitianExponential(h)(t); }

double spectral_norm(const DenseMatrix& m) {
  require_square(m, "spectral_norm");
  if (m.rows() > kSpectralNormDimCap) {
    throw ResourceError("spectral_norm: dimension " + std::to_string(m.rows()) +
                        " exceeds the cap of " + std::to_string(kSpectralNormDimCap));
  }
  if (m.size() == 0) return 0.0;
  const DenseMatrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double unitarity_defect(const DenseMatrix& u) {
  const DenseMatrix d = u.adjoint() * u - DenseMatrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

DenseMatrix commuting_exponential(const AlgebraElement& h0, double t) {
  if (!pairwise_commuting(h0)) {
    throw ContractError("exponential of h0 requires pairwise commuting strings: " + h0.to_string());
  }
  const Eigen::Index dim = Eigen::Index{1} << h0.num_qubits();
  DenseMatrix d = DenseMatrix::Identity(dim, dim);
  for (const auto& [p, c] : h0.terms()) {
    const double a = c * t;
    d = std::cos(a) * d - Complex(0.0, std::sin(a)) * multiply_right(d, p);
  }
  return d;
}

DenseMatrix fixed_depth_evolution(const DenseMatrix& k_c, const AlgebraElement& h0, double t) {
  const DenseMatrix d = commuting_exponential(h0, t);
  if (d.rows() != k_c.rows()) throw DimensionError("fixed_depth_evolution: K and h0 sizes differ");
  return k_c.adjoint() * d * k_c;
}

ErrorCurve error_curve(const AlgebraElement& h, const DenseMatrix& k_c, const AlgebraElement& h0,
                       std::span<const double> t_grid) {
  if (h.num_qubits() != h0.num_qubits()) throw DimensionError("error_curve: H and h0 differ in n");
  const HermitianExponential exact(h);
  ErrorCurve curve;
  curve.reserve(t_grid.size());
  for (double t : t_grid) {
    curve.push_back({t, spectral_norm(exact(t) - fixed_depth_evolution(k_c, h0, t))});
  }
  return curve;
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (points < 2) throw ArgumentError("uniform_grid: need at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = t_max * static_cast<double>(i) / (points - 1);
  }
  return grid;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw ArgumentError("geometric_grid: need 0 < lo < hi and at least two points");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.back() = hi;
  return grid;
}

DenseMatrix zassenhaus_product(const AlgebraElement& a, const AlgebraElement& b, int order,
                               double scale, CoefficientConvention conv) {
  if (order < 1 || order > kMaxOrder) {
    throw ArgumentError("zassenhaus_product: order must be in 1..4 (got " + std::to_string(order) +
                        ")");
  }
  if (a.num_qubits() != b.num_qubits()) throw DimensionError("zassenhaus_product: n mismatch");
  require_zassenhaus_cap(a.num_qubits(), "zassenhaus_product");

  DenseMatrix u = exp_i(a, scale) * exp_i(b, scale);
  const AlgebraElement ops[2] = {scale * a, scale * b};
  for (int k = 2; k <= order; ++k) {
    // Every nested commutator of iX_a is i times a Hermitian generator.
    AlgebraElement w(a.num_qubits());
    for (const auto& term : truncation_coefficients(k, conv).two_generator) {
      w = w + term.weight * nested_generator(term.shape, ops);
    }
    if (!w.empty()) u = u * exp_i(w, 1.0);
  }
  return u;
}

SlopeReport fit_log_log(std::span<const double> x, std::span<const double> err) {
  if (x.size() != err.size()) throw ArgumentError("fit_log_log: size mismatch");
  SlopeReport rep;
  rep.s.assign(x.begin(), x.end());
  rep.errors.assign(err.begin(), err.end());
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && err[i] > kSaturationFloor) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  rep.points = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    rep.saturated = true;
    return rep;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  return rep;
}

SlopeReport truncation_slope(const AlgebraElement& a, const AlgebraElement& b, int order,
                             std::span<const double> s_grid, CoefficientConvention conv) {
  if (s_grid.size() < 5) throw ArgumentError("truncation_slope: s grid needs at least 5 points");
  for (double s : s_grid) {
    if (s < 1e-4 || s > 1e-1) throw ArgumentError("truncation_slope: s grid must lie in [1e-4, 1e-1]");
  }
  const AlgebraElement sum = a + b;
  const HermitianExponential exact(sum);
  std::vector<double> errs;
  errs.reserve(s_grid.size());
  for (double s : s_grid) {
    errs.push_back(spectral_norm(exact(-s) - zassenhaus_product(a, b, order, s, conv)));
  }
  SlopeReport rep = fit_log_log(s_grid, errs);
  rep.order = order;
  return rep;
}

DenseMatrix trotter_step(const AlgebraElement& a, const AlgebraElement& b, double t, int m,
                         bool corrected) {
  if (m < 1) throw ArgumentError("trotter_step: m must be >= 1 (got " + std::to_string(m) + ")");
  if (a.num_qubits() != b.num_qubits()) throw DimensionError("trotter_step: n mismatch");
  require_zassenhaus_cap(a.num_qubits(), "trotter_step");

  const double tau = t / m;
  DenseMatrix step = exp_i(a, -tau) * exp_i(b, -tau);
  if (corrected) {
    const AlgebraElement comm = bracket(a, b);
    if (!comm.empty()) step = step * exp_i(comm, 0.5 * tau * tau);
  }
  DenseMatrix u = step;
  for (int i = 1; i < m; ++i) u = u * step;
  return u;
}

TrotterSweep trotter_sweep(const AlgebraElement& a, const AlgebraElement& b, double t,
                           std::span<const int> steps) {
  TrotterSweep out;
  out.t = t;
  out.steps.assign(steps.begin(), steps.end());
  const DenseMatrix exact = expm_hermitian(a + b, t);
  std::vector<double> ms;
  for (int m : steps) {
    ms.push_back(static_cast<double>(m));
    out.err_uncorrected.push_back(spectral_norm(exact - trotter_step(a, b, t, m, false)));
    out.err_corrected.push_back(spectral_norm(exact - trotter_step(a, b, t, m, true)));
  }
  out.fit_uncorrected = fit_log_log(ms, out.err_uncorrected);
  out.fit_corrected = fit_log_log(ms, out.err_corrected);
  out.fit_uncorrected.order = 1;
  out.fit_corrected.order = 2;
  return out;
}

}  // namespace fdsim
