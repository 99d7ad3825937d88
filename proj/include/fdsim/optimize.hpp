#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdsim/pauli.hpp"
#include "fdsim/zassenhaus.hpp"

namespace fdsim {

/// v = sum_i gamma_i h_i with gamma_i = (1/pi)^i over the canonical h basis.
struct TargetV {
  AlgebraElement element;
  std::vector<PauliString> basis;
  std::vector<double> gammas;
};

TargetV make_target_v(std::span<const PauliString> h_basis);

enum class GradMode { finite_difference, analytic };
enum class LineSearchMode { armijo, wolfe };

const char* to_string(GradMode m);
const char* to_string(LineSearchMode m);
GradMode grad_mode_from_string(const std::string& s);
LineSearchMode line_search_from_string(const std::string& s);

struct OptimizerOptions {
  GradMode grad_mode = GradMode::analytic;
  double fd_step = 1e-6;
  double tol_grad_inf = 1e-10;
  int max_iters = 5000;
  LineSearchMode line_search = LineSearchMode::armijo;
  double armijo_c1 = 1e-4;
  double backtrack_rho = 0.5;
  double wolfe_c2 = 0.9;
  std::uint64_t seed = 0;
  double init_scale = 0.01;
  int multi_start = 1;
  /// Trial steps are shortened so no coordinate moves more than this.
  double max_step = 0.1;

  /// Throws ConfigError when an invariant (0 < c1 < c2 < 1, ...) fails.
  void validate() const;
};

inline constexpr int kMaxBacktracks = 60;
inline constexpr double kCurvatureGuard = 1e-12;

struct TraceRow {
  int iteration = 0;
  double cost = 0.0;
  double grad_inf = 0.0;
};

struct BfgsResult {
  std::vector<double> theta;
  std::vector<TraceRow> trace;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

using CostFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Quasi-Newton minimization with an inverse-Hessian estimate that starts at
/// the identity. Throws NumericalError on non-finite values and
/// StagnationError when the line search exhausts its backtracks.
BfgsResult bfgs_minimize(const CostFn& cost_fn, const GradFn& grad_fn, std::vector<double> theta0,
                         const OptimizerOptions& options);

/// Compiled evaluator for f(theta) = tr(K^dagger v K H).
///
/// Both v and H are expanded on the smallest string set closed under every
/// ansatz rotation, and each rotation is precomputed as a list of 2x2 plane
/// rotations on that set. Value costs O(rotations * pairs); the gradient is a
/// single reverse sweep.
class CostFunction {
 public:
  CostFunction(const Ansatz& ansatz, const AlgebraElement& v, const AlgebraElement& h,
               std::size_t basis_cap = 1u << 16);

  std::size_t parameter_count() const noexcept { return params_; }
  std::size_t basis_size() const noexcept { return basis_.size(); }

  double value(std::span<const double> theta) const;
  /// Returns f and writes the analytic gradient.
  double value_and_gradient(std::span<const double> theta, std::span<double> grad) const;
  void central_difference(std::span<const double> theta, double step, std::span<double> grad) const;

 private:
  struct PlanePair {
    std::uint32_t q;
    std::uint32_t r;
    double sigma_q;  // (1/2)⟦P,Q⟧ = sigma_q R
    double sigma_r;  // (1/2)⟦P,R⟧ = sigma_r Q
  };
  struct Step {
    std::uint32_t plan;  // index into plans_
    double weight;
    std::uint32_t factor;
  };

  void rotate(std::vector<double>& a, const std::vector<PlanePair>& plan, double phi) const;
  void angles(std::span<const double> theta, std::vector<double>& out) const;

  int n_;
  std::size_t params_;
  std::vector<PauliString> basis_;
  std::vector<std::vector<PlanePair>> plans_;
  std::vector<Step> steps_;
  std::vector<Monomial> monomials_;
  std::vector<double> v_;
  std::vector<double> h_;
};

/// f = hs_inner(K^dagger v K, H), evaluated through adjoint_k.
double cost(const Ansatz& ansatz, std::span<const double> theta, const TargetV& v,
            const AlgebraElement& h);

std::vector<double> gradient(const Ansatz& ansatz, std::span<const double> theta,
                             const TargetV& v, const AlgebraElement& h,
                             const OptimizerOptions& options);

/// f / (||v||_F ||H||_F).
double normalized_cost(double f, const AlgebraElement& v, const AlgebraElement& h);

struct H0Extraction {
  AlgebraElement h0;
  double residual_fro = 0.0;
  /// K H K^dagger in full; h0 plus the residual terms.
  AlgebraElement conjugated;
};

H0Extraction extract_h0(const Ansatz& ansatz, std::span<const double> theta_star,
                        const AlgebraElement& h, std::span<const PauliString> h_basis);

/// Uniform draw in [-init_scale, init_scale] from a seeded mt19937_64.
std::vector<double> initial_theta(std::size_t count, double init_scale, std::uint64_t seed);

struct OptimizationResult {
  std::vector<double> theta_star;
  std::vector<TraceRow> cost_trace;
  bool converged = false;
  int iterations = 0;
  std::string status;
  double final_cost = 0.0;
  std::uint64_t seed_used = 0;
  AlgebraElement h0;
  double residual_fro = 0.0;
};

/// Runs bfgs_minimize from `multi_start` seeds (options.seed, +1, ...), keeps
/// the lowest final cost and extracts h0.
OptimizationResult optimize_decomposition(const Ansatz& ansatz, const TargetV& v,
                                          const AlgebraElement& h,
                                          std::span<const PauliString> h_basis,
                                          const OptimizerOptions& options);

}  // namespace fdsim
