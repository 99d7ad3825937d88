#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fdsim/error.hpp"
#include "fdsim/lie.hpp"
#include "fdsim/models.hpp"
#include "fdsim/optimize.hpp"
#include "oracle.hpp"

using namespace fdsim;

namespace {

const oracle::C kI(0.0, 1.0);

oracle::M element_matrix(const AlgebraElement& a) {
  std::vector<std::pair<std::string, double>> terms;
  for (const auto& [p, c] : a.terms()) terms.emplace_back(p.label(), c);
  return oracle::sum_matrix(terms, a.num_qubits());
}

oracle::M oracle_k(const Ansatz& ansatz, std::span<const double> theta) {
  const Eigen::Index dim = Eigen::Index{1} << ansatz.num_qubits();
  oracle::M k = oracle::M::Identity(dim, dim);
  for (const auto& f : ansatz.factors()) {
    const double m = f.monomial.value(theta);
    for (const auto& r : f.rotations) {
      k = k * oracle::expm(kI * m * r.weight * oracle::label_matrix(r.string.label()));
    }
  }
  return k;
}

struct Problem {
  AlgebraElement h;
  CartanSplit split;
  Ansatz ansatz;
  TargetV v;
};

Problem problem(const std::string& name, int n, int order) {
  ModelSpec spec;
  spec.name = name;
  spec.n = n;
  AlgebraElement h = build_model(spec);
  CartanSplit split = cartan_decompose(h);
  Ansatz ansatz = build_ansatz(split.k_basis, order);
  TargetV v = make_target_v(split.h_basis);
  return {std::move(h), std::move(split), std::move(ansatz), std::move(v)};
}

std::vector<double> random_theta(std::size_t count, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> out(count);
  for (auto& x : out) x = d(rng);
  return out;
}

double inf_norm(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Largest single-step increase the noise-floor acceptance rule admits.
double trace_slack(double f) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
}

const std::vector<std::pair<std::string, int>> kModels = {
    {"tfim", 3}, {"xy", 3}, {"tfxy", 3}, {"heisenberg", 3}, {"kitaev_even", 4}, {"kitaev_odd", 3}};

}  // namespace

TEST(TargetV, Coefficients) {
  const std::vector<PauliString> one = {PauliString::parse("ZI")};
  const TargetV v1 = make_target_v(one);
  EXPECT_DOUBLE_EQ(v1.element.coeff(one[0]), 1.0 / std::numbers::pi);

  const std::vector<PauliString> three = {PauliString::parse("ZII"), PauliString::parse("IZI"),
                                          PauliString::parse("IIZ")};
  const TargetV v3 = make_target_v(three);
  ASSERT_EQ(v3.gammas.size(), 3u);
  EXPECT_DOUBLE_EQ(v3.gammas[0], 1.0 / std::numbers::pi);
  EXPECT_DOUBLE_EQ(v3.gammas[1], 1.0 / (std::numbers::pi * std::numbers::pi));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_GT(std::abs(v3.gammas[i] - v3.gammas[j]), 1e-12);
    if (i > 0) {
      EXPECT_LT(v3.gammas[i], v3.gammas[i - 1]);
    }
  }
  std::vector<PauliString> none;
  EXPECT_THROW(make_target_v(none), ArgumentError);
}

TEST(Cost, TfimTwoSitesAtZero) {
  const std::vector<PauliString> hb = {PauliString::parse("XX"), PauliString::parse("YY")};
  const TargetV v = make_target_v(hb);
  const std::vector<PauliString> k = {PauliString::parse("XY"), PauliString::parse("YX")};
  const Ansatz a = build_ansatz(k, 2);
  const AlgebraElement h(PauliString::parse("XX"));
  const std::vector<double> zero(2, 0.0);
  EXPECT_NEAR(cost(a, zero, v, h), 4.0 / std::numbers::pi, 1e-15);
  const CostFunction f(a, v.element, h);
  EXPECT_NEAR(f.value(zero), 4.0 / std::numbers::pi, 1e-15);
}

TEST(Cost, MatchesDenseTrace) {
  std::mt19937_64 rng(3);
  for (const auto& [name, n] : kModels) {
    for (int order : {1, 2, 3, 4}) {
      const Problem p = problem(name, n, order);
      const CostFunction f(p.ansatz, p.v.element, p.h);
      const oracle::M vd = element_matrix(p.v.element);
      const oracle::M hd = element_matrix(p.h);
      for (int trial = 0; trial < 3; ++trial) {
        const auto theta = random_theta(p.ansatz.parameter_count(), rng, 1.0);
        const oracle::M k = oracle_k(p.ansatz, theta);
        const double dense = (k.adjoint() * vd * k * hd).trace().real();
        EXPECT_NEAR(cost(p.ansatz, theta, p.v, p.h), dense, 1e-10) << name << order;
        EXPECT_NEAR(f.value(theta), dense, 1e-10) << name << order;
      }
    }
  }
}

TEST(Gradient, AnalyticMatchesCentralDifference) {
  std::mt19937_64 rng(4);
  for (const auto& [name, n] : kModels) {
    for (int order : {2, 4}) {
      const Problem p = problem(name, n, order);
      const CostFunction f(p.ansatz, p.v.element, p.h);
      OptimizerOptions fd;
      fd.grad_mode = GradMode::finite_difference;
      OptimizerOptions an;
      for (int trial = 0; trial < 20; ++trial) {
        const auto theta = random_theta(p.ansatz.parameter_count(), rng, 1.0);
        std::vector<double> g(theta.size());
        const double value = f.value_and_gradient(theta, g);
        EXPECT_NEAR(value, f.value(theta), 1e-12);
        const auto g_fd = gradient(p.ansatz, theta, p.v, p.h, fd);
        const auto g_an = gradient(p.ansatz, theta, p.v, p.h, an);
        EXPECT_LT(inf_norm(g, g_fd), 1e-6) << name << order;
        EXPECT_LT(inf_norm(g, g_an), 1e-12) << name << order;
      }
    }
  }
}

TEST(Gradient, InertParameterHasZeroComponent) {
  // ZZ commutes with both v and H, so theta has no effect on f.
  const std::vector<PauliString> hb = {PauliString::parse("XX")};
  const TargetV v = make_target_v(hb);
  const std::vector<PauliString> k = {PauliString::parse("ZZ")};
  const Ansatz a = build_ansatz(k, 1);
  const AlgebraElement h(PauliString::parse("XX"));
  const std::vector<double> theta = {0.4};
  OptimizerOptions opts;
  EXPECT_NEAR(gradient(a, theta, v, h, opts)[0], 0.0, 1e-14);
}

TEST(Bfgs, QuadraticBowl) {
  const std::vector<double> c = {1.5, -2.0, 0.25, 3.0};
  auto f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
    return s;
  };
  auto g = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * (x[i] - c[i]);
  };
  OptimizerOptions opts;
  opts.max_step = 10.0;
  const BfgsResult r = bfgs_minimize(f, g, std::vector<double>(4, 0.0), opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 30);
  EXPECT_LT(inf_norm(r.theta, c), 1e-8);
}

TEST(Bfgs, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  auto g = [](std::span<const double> x, std::span<double> out) {
    out[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
    out[1] = 200.0 * (x[1] - x[0] * x[0]);
  };
  for (auto mode : {LineSearchMode::armijo, LineSearchMode::wolfe}) {
    OptimizerOptions opts;
    opts.line_search = mode;
    opts.max_step = 1.0;
    const BfgsResult r = bfgs_minimize(f, g, {-1.2, 1.0}, opts);
    EXPECT_TRUE(r.converged) << to_string(mode);
    EXPECT_NEAR(r.theta[0], 1.0, 1e-5);
    EXPECT_NEAR(r.theta[1], 1.0, 1e-5);
    if (mode == LineSearchMode::armijo) {
      for (std::size_t i = 1; i < r.trace.size(); ++i) {
        EXPECT_LE(r.trace[i].cost, r.trace[i - 1].cost + trace_slack(r.trace[i - 1].cost));
      }
    }
  }
}

TEST(Bfgs, NonFiniteCostIsNumericalError) {
  auto f = [](std::span<const double> x) { return x[0] > 0.5 ? std::nan("") : -x[0]; };
  auto g = [](std::span<const double>, std::span<double> out) { out[0] = -1.0; };
  OptimizerOptions opts;
  try {
    bfgs_minimize(f, g, {0.0}, opts);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_GE(e.iteration(), 0);
  }
  auto bad = [](std::span<const double>) { return std::numeric_limits<double>::infinity(); };
  EXPECT_THROW(bfgs_minimize(bad, g, {0.0}, opts), NumericalError);
}

TEST(Bfgs, OptionsValidation) {
  OptimizerOptions opts;
  opts.armijo_c1 = 0.95;
  EXPECT_THROW(opts.validate(), ConfigError);
  opts = OptimizerOptions{};
  opts.max_step = 0.0;
  EXPECT_THROW(opts.validate(), ConfigError);
  opts = OptimizerOptions{};
  opts.multi_start = 0;
  EXPECT_THROW(opts.validate(), ConfigError);
  EXPECT_NO_THROW(OptimizerOptions{}.validate());
}

TEST(InitialTheta, SeededAndBounded) {
  const auto a = initial_theta(50, 0.01, 9);
  const auto b = initial_theta(50, 0.01, 9);
  const auto c = initial_theta(50, 0.01, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (double x : a) EXPECT_LE(std::abs(x), 0.01);
}

TEST(ExtractH0, HamiltonianAlreadyInH) {
  const Problem p = problem("tfim", 2, 2);
  const AlgebraElement h = restrict_to(p.v.element, p.split.h_basis);
  const std::vector<double> zero(p.ansatz.parameter_count(), 0.0);
  const H0Extraction e = extract_h0(p.ansatz, zero, h, p.split.h_basis);
  EXPECT_EQ(e.h0, h);
  EXPECT_EQ(e.residual_fro, 0.0);
}

TEST(ExtractH0, PythagorasOnRandomTheta) {
  std::mt19937_64 rng(6);
  for (const auto& [name, n] : kModels) {
    const Problem p = problem(name, n, 2);
    const auto theta = random_theta(p.ansatz.parameter_count(), rng, 1.0);
    const H0Extraction e = extract_h0(p.ansatz, theta, p.h, p.split.h_basis);
    const double total = hs_inner(e.conjugated, e.conjugated);
    const double parts = hs_inner(e.h0, e.h0) + e.residual_fro * e.residual_fro;
    EXPECT_NEAR(total, parts, 1e-10 * std::max(1.0, total)) << name;
    EXPECT_NEAR(total, hs_inner(p.h, p.h), 1e-10 * std::max(1.0, total)) << name;
    const AlgebraElement residual = e.conjugated - e.h0;
    EXPECT_NEAR(fro_norm(residual), e.residual_fro, 1e-10) << name;
  }
}

TEST(OptimizeDecomposition, TfimFourSitesOrderTwo) {
  const Problem p = problem("tfim", 4, 2);
  OptimizerOptions opts;
  opts.seed = 7;
  const OptimizationResult r = optimize_decomposition(p.ansatz, p.v, p.h, p.split.h_basis, opts);
  EXPECT_TRUE(r.converged) << r.status;
  EXPECT_LT(r.residual_fro / fro_norm(p.h), 1e-6);
  for (std::size_t i = 1; i < r.cost_trace.size(); ++i) {
    EXPECT_LE(r.cost_trace[i].cost, r.cost_trace[i - 1].cost + trace_slack(r.cost_trace[i - 1].cost));
  }
  std::vector<double> g(r.theta_star.size());
  CostFunction(p.ansatz, p.v.element, p.h).value_and_gradient(r.theta_star, g);
  double gmax = 0.0;
  for (double x : g) gmax = std::max(gmax, std::abs(x));
  EXPECT_LT(gmax, opts.tol_grad_inf);

  const OptimizationResult again = optimize_decomposition(p.ansatz, p.v, p.h, p.split.h_basis, opts);
  EXPECT_EQ(r.theta_star, again.theta_star);
  ASSERT_EQ(r.cost_trace.size(), again.cost_trace.size());
  for (std::size_t i = 0; i < r.cost_trace.size(); ++i) {
    EXPECT_EQ(r.cost_trace[i].cost, again.cost_trace[i].cost);
  }
}

TEST(OptimizeDecomposition, MultiStartKeepsLowestCost) {
  const Problem p = problem("tfim", 3, 2);
  OptimizerOptions single;
  single.init_scale = 1.0;
  single.seed = 2;
  OptimizerOptions multi = single;
  multi.multi_start = 4;
  const auto a = optimize_decomposition(p.ansatz, p.v, p.h, p.split.h_basis, single);
  const auto b = optimize_decomposition(p.ansatz, p.v, p.h, p.split.h_basis, multi);
  EXPECT_LE(b.final_cost, a.final_cost + 1e-12);
  EXPECT_GE(b.seed_used, multi.seed);
  EXPECT_LT(b.seed_used, multi.seed + 4);
}

TEST(NormalizedCost, ScaleFree) {
  const Problem p = problem("tfim", 3, 1);
  const double f = 0.7;
  EXPECT_NEAR(normalized_cost(f, p.v.element, p.h),
              normalized_cost(6.0 * f, 2.0 * p.v.element, 3.0 * p.h), 1e-15);
  EXPECT_NEAR(normalized_cost(hs_inner(p.v.element, p.h), p.v.element, p.h),
              hs_inner(p.v.element, p.h) / (fro_norm(p.v.element) * fro_norm(p.h)), 1e-15);
}
