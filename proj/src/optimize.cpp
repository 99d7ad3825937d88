#include "fdsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "fdsim/error.hpp"

namespace fdsim {

TargetV make_target_v(std::span<const PauliString> h_basis) {
  if (h_basis.empty()) throw ArgumentError("make_target_v: empty h basis");
  std::vector<PauliString> basis(h_basis.begin(), h_basis.end());
  std::sort(basis.begin(), basis.end());
  const int n = basis.front().num_qubits();

  std::vector<double> gammas;
  std::vector<AlgebraElement::Term> terms;
  double gamma = 1.0;
  for (const auto& p : basis) {
    gamma /= std::numbers::pi;
    gammas.push_back(gamma);
    terms.emplace_back(p, gamma);
  }
  // (1/pi)^i can drop under the default prune threshold for very large h;
  // keep every gamma by disabling pruning on v.
  return TargetV{AlgebraElement(n, std::move(terms), 0.0), std::move(basis), std::move(gammas)};
}

const char* to_string(GradMode m) {
  return m == GradMode::analytic ? "analytic" : "fd";
}

const char* to_string(LineSearchMode m) {
  return m == LineSearchMode::armijo ? "armijo" : "wolfe";
}

GradMode grad_mode_from_string(const std::string& s) {
  if (s == "analytic") return GradMode::analytic;
  if (s == "fd" || s == "finite-difference") return GradMode::finite_difference;
  throw ConfigError("unknown gradient mode '" + s + "' (expected fd|analytic)");
}

LineSearchMode line_search_from_string(const std::string& s) {
  if (s == "armijo") return LineSearchMode::armijo;
  if (s == "wolfe") return LineSearchMode::wolfe;
  throw ConfigError("unknown line search '" + s + "' (expected armijo|wolfe)");
}

void OptimizerOptions::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("optimizer options: " + m); };
  if (!(armijo_c1 > 0.0 && armijo_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    fail("require 0 < armijo_c1 < wolfe_c2 < 1");
  }
  if (!(backtrack_rho > 0.0 && backtrack_rho < 1.0)) fail("require 0 < backtrack_rho < 1");
  if (!(fd_step > 0.0)) fail("require fd_step > 0");
  if (!(tol_grad_inf > 0.0)) fail("require tol_grad_inf > 0");
  if (max_iters < 0) fail("require max_iters >= 0");
  if (!(init_scale >= 0.0)) fail("require init_scale >= 0");
  if (multi_start < 1) fail("require multi_start >= 1");
  if (!(max_step > 0.0)) fail("require max_step > 0");
}

double cost(const Ansatz& ansatz, std::span<const double> theta, const TargetV& v,
            const AlgebraElement& h) {
  const AlgebraElement rotated = adjoint_k(ansatz, theta, v.element, ConjugationSide::k_dagger_e_k);
  return hs_inner(rotated, h);
}

std::vector<double> gradient(const Ansatz& ansatz, std::span<const double> theta,
                             const TargetV& v, const AlgebraElement& h,
                             const OptimizerOptions& options) {
  const CostFunction fn(ansatz, v.element, h);
  std::vector<double> g(ansatz.parameter_count());
  if (options.grad_mode == GradMode::analytic) {
    fn.value_and_gradient(theta, g);
  } else {
    fn.central_difference(theta, options.fd_step, g);
  }
  return g;
}

double normalized_cost(double f, const AlgebraElement& v, const AlgebraElement& h) {
  const double denom = fro_norm(v) * fro_norm(h);
  return denom > 0.0 ? f / denom : 0.0;
}

H0Extraction extract_h0(const Ansatz& ansatz, std::span<const double> theta_star,
                        const AlgebraElement& h, std::span<const PauliString> h_basis) {
  H0Extraction out;
  out.conjugated = adjoint_k(ansatz, theta_star, h, ConjugationSide::k_e_k_dagger);
  std::vector<PauliString> keep(h_basis.begin(), h_basis.end());
  std::sort(keep.begin(), keep.end());
  std::vector<AlgebraElement::Term> inside;
  double outside = 0.0;
  for (const auto& t : out.conjugated.terms()) {
    if (std::binary_search(keep.begin(), keep.end(), t.first)) {
      inside.push_back(t);
    } else {
      outside += t.second * t.second;
    }
  }
  out.h0 = AlgebraElement(h.num_qubits(), std::move(inside), h.prune_threshold());
  out.residual_fro = std::sqrt(std::ldexp(outside, h.num_qubits()));
  return out;
}

std::vector<double> initial_theta(std::size_t count, double init_scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-init_scale, init_scale);
  std::vector<double> theta(count);
  for (auto& t : theta) t = init_scale > 0.0 ? dist(rng) : 0.0;
  return theta;
}

OptimizationResult optimize_decomposition(const Ansatz& ansatz, const TargetV& v,
                                          const AlgebraElement& h,
                                          std::span<const PauliString> h_basis,
                                          const OptimizerOptions& options) {
  options.validate();
  const CostFunction fn(ansatz, v.element, h);
  const CostFn cost_fn = [&fn](std::span<const double> t) { return fn.value(t); };
  GradFn grad_fn;
  if (options.grad_mode == GradMode::analytic) {
    grad_fn = [&fn](std::span<const double> t, std::span<double> g) { fn.value_and_gradient(t, g); };
  } else {
    const double step = options.fd_step;
    grad_fn = [&fn, step](std::span<const double> t, std::span<double> g) {
      fn.central_difference(t, step, g);
    };
  }

  OptimizationResult best;
  bool have = false;
  std::optional<StagnationError> last_failure;
  for (int start = 0; start < options.multi_start; ++start) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(start);
    BfgsResult r;
    try {
      r = bfgs_minimize(cost_fn, grad_fn,
                        initial_theta(ansatz.parameter_count(), options.init_scale, seed), options);
    } catch (const StagnationError& e) {
      // A stalled start is dropped as long as another start finishes.
      last_failure = e;
      continue;
    }
    if (!have || r.cost < best.final_cost) {
      best.theta_star = std::move(r.theta);
      best.cost_trace = std::move(r.trace);
      best.converged = r.converged;
      best.iterations = r.iterations;
      best.status = std::move(r.status);
      best.final_cost = r.cost;
      best.seed_used = seed;
      have = true;
    }
  }

  if (!have) throw *last_failure;

  H0Extraction ex = extract_h0(ansatz, best.theta_star, h, h_basis);
  best.h0 = std::move(ex.h0);
  best.residual_fro = ex.residual_fro;
  return best;
}

}  // namespace fdsim
