#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fdsim/error.hpp"
#include "fdsim/optimize.hpp"

namespace fdsim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// Roundoff scale of a cost value.
double noise_floor(double f) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
}

}  // namespace

BfgsResult bfgs_minimize(const CostFn& cost_fn, const GradFn& grad_fn, std::vector<double> theta0,
                         const OptimizerOptions& options) {
  options.validate();
  const std::size_t n = theta0.size();
  std::vector<double> x = std::move(theta0);
  std::vector<double> g(n);

  double f = cost_fn(x);
  if (!std::isfinite(f)) throw NumericalError("non-finite initial cost", 0);
  grad_fn(x, g);
  if (!all_finite(g)) throw NumericalError("non-finite initial gradient", 0);

  // Row-major inverse-Hessian estimate.
  std::vector<double> hinv(n * n, 0.0);
  auto reset_identity = [&] {
    std::fill(hinv.begin(), hinv.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;
  };
  reset_identity();

  BfgsResult result;
  result.trace.push_back({0, f, inf_norm(g)});

  std::vector<double> p(n);
  std::vector<double> g_new(n);
  std::vector<double> s(n);
  std::vector<double> y(n);
  std::vector<double> hy(n);

  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    if (inf_norm(g) < options.tol_grad_inf) {
      result.converged = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      p[i] = -std::inner_product(hinv.begin() + static_cast<std::ptrdiff_t>(i * n),
                                 hinv.begin() + static_cast<std::ptrdiff_t>((i + 1) * n),
                                 g.begin(), 0.0);
    }
    double gp = dot(g, p);
    if (!(gp < 0.0)) {
      reset_identity();
      for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
      gp = -dot(g, g);
    }
    const double longest = inf_norm(p);
    if (longest > options.max_step) {
      const double shrink = options.max_step / longest;
      for (auto& pi : p) pi *= shrink;
      gp *= shrink;
    }

    // Line search.
    std::vector<double> x_try(n);
    double f_try = f;
    double alpha = 1.0;
    bool accepted = false;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int t = 0; t < kMaxBacktracks; ++t) {
      for (std::size_t i = 0; i < n; ++i) x_try[i] = x[i] + alpha * p[i];
      f_try = cost_fn(x_try);
      if (!std::isfinite(f_try)) throw NumericalError("non-finite cost in line search", iter + 1);

      // Once even the full step predicts a decrease below the resolution of
      // f, cost comparisons are roundoff; the quasi-Newton step is taken if f
      // stays within that floor.
      const double predicted = options.armijo_c1 * alpha * gp;
      const bool sufficient =
          f_try <= f + predicted ||
          (alpha == 1.0 && -options.armijo_c1 * gp <= noise_floor(f) && f_try <= f + noise_floor(f));

      if (options.line_search == LineSearchMode::armijo) {
        if (sufficient) {
          accepted = true;
          break;
        }
        alpha *= options.backtrack_rho;
        continue;
      }

      // Weak Wolfe by bracketing and bisection.
      if (!sufficient) {
        hi = alpha;
      } else {
        grad_fn(x_try, g_new);
        if (!all_finite(g_new)) throw NumericalError("non-finite gradient in line search", iter + 1);
        if (dot(g_new, p) >= options.wolfe_c2 * gp) {
          accepted = true;
          break;
        }
        lo = alpha;
      }
      alpha = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
    }
    if (!accepted) {
      result.theta = x;
      throw StagnationError("line search failed after " + std::to_string(kMaxBacktracks) +
                                " trials at iteration " + std::to_string(iter + 1),
                            x, f);
    }

    if (x_try == x) {
      throw StagnationError("step below the resolution of theta at iteration " +
                                std::to_string(iter + 1),
                            x, f);
    }
    grad_fn(x_try, g_new);
    if (!all_finite(g_new)) throw NumericalError("non-finite gradient", iter + 1);

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_try[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > kCurvatureGuard) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        hy[i] = std::inner_product(hinv.begin() + static_cast<std::ptrdiff_t>(i * n),
                                   hinv.begin() + static_cast<std::ptrdiff_t>((i + 1) * n),
                                   y.begin(), 0.0);
      }
      const double yhy = dot(y, hy);
      const double coef = (1.0 + rho * yhy) * rho;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          hinv[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }

    x.swap(x_try);
    g.swap(g_new);
    f = f_try;
    result.trace.push_back({iter + 1, f, inf_norm(g)});
  }

  if (!result.converged && inf_norm(g) < options.tol_grad_inf) result.converged = true;
  result.theta = std::move(x);
  result.cost = f;
  result.iterations = iter;
  result.status = result.converged ? "converged" : "max_iters";
  return result;
}

}  // namespace fdsim
