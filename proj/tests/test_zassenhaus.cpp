#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fdsim/error.hpp"
#include "fdsim/lie.hpp"
#include "fdsim/models.hpp"
#include "fdsim/zassenhaus.hpp"
#include "oracle.hpp"

using namespace fdsim;

namespace {

const oracle::C kI(0.0, 1.0);

std::vector<PauliString> strings(std::initializer_list<const char*> labels) {
  std::vector<PauliString> out;
  for (const char* l : labels) out.push_back(PauliString::parse(l));
  return out;
}

oracle::M element_matrix(const AlgebraElement& a) {
  std::vector<std::pair<std::string, double>> terms;
  for (const auto& [p, c] : a.terms()) terms.emplace_back(p.label(), c);
  return oracle::sum_matrix(terms, a.num_qubits());
}

// K as the ordered product of exp(i * angle * P) over all rotations.
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

std::vector<double> random_theta(std::size_t count, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> out(count);
  for (auto& x : out) x = d(rng);
  return out;
}

CartanSplit split_for(const std::string& name, int n) {
  ModelSpec spec;
  spec.name = name;
  spec.n = n;
  return cartan_decompose(build_model(spec));
}

const std::vector<std::pair<std::string, int>> kModels = {
    {"tfim", 3}, {"xy", 4}, {"tfxy", 3}, {"heisenberg", 3}, {"kitaev_even", 4}, {"kitaev_odd", 3}};

}  // namespace

TEST(TruncationCoefficients, SecondOrder) {
  const auto t = truncation_coefficients(2);
  ASSERT_EQ(t.two_generator.size(), 1u);
  EXPECT_EQ(t.two_generator[0].shape, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(t.two_generator[0].weight, -0.5);
}

TEST(TruncationCoefficients, ThirdOrderConventions) {
  const auto standard = truncation_coefficients(3);
  ASSERT_EQ(standard.two_generator.size(), 2u);
  EXPECT_DOUBLE_EQ(standard.two_generator[0].weight, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(standard.two_generator[1].weight, 1.0 / 3.0);
  const auto printed = truncation_coefficients(3, CoefficientConvention::printed);
  EXPECT_DOUBLE_EQ(printed.two_generator[1].weight, 1.0 / 6.0);
}

TEST(TruncationCoefficients, FourthOrderWeights) {
  const auto t = truncation_coefficients(4);
  ASSERT_EQ(t.multivariate.size(), 4u);
  const double expected[] = {-1.0 / 24, -3.0 / 24, -3.0 / 24, -1.0 / 24};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(t.multivariate[i].weight, expected[i]);
}

TEST(TruncationCoefficients, RejectsOtherOrders) {
  EXPECT_THROW(truncation_coefficients(1), ArgumentError);
  EXPECT_THROW(truncation_coefficients(5), ArgumentError);
}

TEST(NestedGenerator, MatchesDenseCommutators) {
  // For A_j = i a_j, a nested commutator of the A's equals i * generator.
  std::mt19937_64 rng(11);
  const int n = 2;
  std::vector<AlgebraElement> ops;
  std::vector<oracle::M> dense;
  for (int k = 0; k < 4; ++k) {
    const auto terms = oracle::random_terms(n, 3, rng);
    ops.push_back(AlgebraElement::from_labels(terms));
    dense.push_back(kI * oracle::sum_matrix(terms, n));
  }
  const std::vector<std::vector<int>> shapes = {{0, 1}, {0, 0, 1}, {1, 0, 1}, {0, 1, 2, 3},
                                                {0, 3, 1, 2}, {3, 1, 2, 0}};
  for (const auto& shape : shapes) {
    oracle::M nested = dense[static_cast<std::size_t>(shape.back())];
    for (std::size_t i = shape.size() - 1; i-- > 0;) {
      nested = oracle::commutator(dense[static_cast<std::size_t>(shape[i])], nested);
    }
    const oracle::M got = kI * element_matrix(nested_generator(shape, ops));
    EXPECT_LT(oracle::max_abs(got - nested), 1e-12) << shape.size();
  }
}

TEST(BuildAnsatz, TfimTwoSitesHasNoPairFactors) {
  const auto k = strings({"XY", "YX"});
  const Ansatz a = build_ansatz(k, 2);
  EXPECT_EQ(a.block_counts().linear, 2u);
  EXPECT_EQ(a.block_counts().pair, 0u);
}

TEST(BuildAnsatz, SingleQubitPairFactor) {
  const auto k = strings({"X", "Y"});
  const Ansatz a = build_ansatz(k, 2);
  ASSERT_EQ(a.factors().size(), 3u);
  const Factor& pair = a.factors()[2];
  EXPECT_EQ(pair.kind, FactorKind::pair);
  // exp(i * (-1/2 t1 t2) * (-2Z))
  const double theta[] = {0.3, -0.7};
  const double coeff = pair.monomial.value(theta);
  EXPECT_NEAR(coeff, -0.5 * 0.3 * -0.7, 1e-15);
  ASSERT_EQ(pair.generator.size(), 1u);
  EXPECT_EQ(pair.generator.terms()[0].first.label(), "Z");
  EXPECT_DOUBLE_EQ(pair.generator.terms()[0].second, -2.0);

  // Against e^{-[A,B]/2} with A = i t1 X, B = i t2 Y.
  const oracle::M am = kI * theta[0] * oracle::label_matrix("X");
  const oracle::M bm = kI * theta[1] * oracle::label_matrix("Y");
  const oracle::M expected = oracle::expm(-0.5 * oracle::commutator(am, bm));
  const oracle::M got = oracle::expm(kI * coeff * element_matrix(pair.generator));
  EXPECT_LT(oracle::max_abs(got - expected), 1e-13);
}

TEST(BuildAnsatz, OrderOneIsLinearOnly) {
  const CartanSplit split = split_for("tfim", 4);
  const Ansatz a = build_ansatz(split.k_basis, 1);
  EXPECT_EQ(a.factors().size(), split.k_basis.size());
  for (const auto& f : a.factors()) EXPECT_EQ(f.kind, FactorKind::linear);
}

TEST(BuildAnsatz, FactorCounts) {
  const CartanSplit split = split_for("tfim", 4);
  const std::size_t d = split.k_basis.size();
  const Ansatz a = build_ansatz(split.k_basis, 2);
  // Pair count equals the number of non-commuting index pairs.
  std::size_t noncommuting = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      noncommuting += !split.k_basis[i].commutes_with(split.k_basis[j]);
    }
  }
  EXPECT_EQ(a.block_counts().pair, noncommuting);
  EXPECT_EQ(a.block_counts().pair, 24u);
  EXPECT_LE(a.factors().size(), d + d * (d - 1) / 2);
}

TEST(BuildAnsatz, OrdersNestAsPrefixes) {
  const CartanSplit split = split_for("tfim", 3);
  for (int order = 1; order < 4; ++order) {
    const Ansatz lo = build_ansatz(split.k_basis, order);
    const Ansatz hi = build_ansatz(split.k_basis, order + 1);
    ASSERT_LE(lo.factors().size(), hi.factors().size());
    for (std::size_t i = 0; i < lo.factors().size(); ++i) {
      EXPECT_EQ(lo.factors()[i].kind, hi.factors()[i].kind);
      EXPECT_EQ(lo.factors()[i].index, hi.factors()[i].index);
      EXPECT_EQ(lo.factors()[i].generator, hi.factors()[i].generator);
    }
  }
}

TEST(BuildAnsatz, GeneratorsStayInK) {
  for (const auto& [name, n] : kModels) {
    const CartanSplit split = split_for(name, n);
    const Ansatz a = build_ansatz(split.k_basis, 4);
    for (const auto& f : a.factors()) {
      EXPECT_FALSE(f.generator.empty());
      for (const auto& [p, c] : f.generator.terms()) {
        EXPECT_NE(std::find(split.k_basis.begin(), split.k_basis.end(), p), split.k_basis.end())
            << name << " " << p.label();
      }
    }
  }
}

TEST(BuildAnsatz, Errors) {
  const auto k = strings({"XY", "YX"});
  EXPECT_THROW(build_ansatz(k, 0), ArgumentError);
  EXPECT_THROW(build_ansatz(k, 5), ArgumentError);
  std::vector<PauliString> none;
  EXPECT_THROW(build_ansatz(none, 2), ArgumentError);
}

TEST(Conjugation, ZByXRotation) {
  const double phi = 0.37;
  const AlgebraElement z(PauliString::parse("Z"));
  const AlgebraElement out = conjugate_by_factor(z, AlgebraElement(PauliString::parse("X")), phi, 1);
  EXPECT_NEAR(out.coeff(PauliString::parse("Z")), std::cos(2 * phi), 1e-15);
  EXPECT_NEAR(out.coeff(PauliString::parse("Y")), std::sin(2 * phi), 1e-15);

  const oracle::M u = oracle::expm(kI * phi * oracle::label_matrix("X"));
  const oracle::M expected = u * oracle::label_matrix("Z") * u.adjoint();
  EXPECT_LT(oracle::max_abs(element_matrix(out) - expected), 1e-13);
}

TEST(Conjugation, TrivialCases) {
  const AlgebraElement e = AlgebraElement::from_labels(
      std::vector<std::pair<std::string, double>>{{"XZ", 0.4}, {"ZZ", -1.1}});
  EXPECT_EQ(conjugate_by_string(e, PauliString::parse("YX"), 0.0), e);
  const AlgebraElement zz(PauliString::parse("ZZ"));
  EXPECT_EQ(conjugate_by_string(zz, PauliString::parse("ZI"), 1.3), zz);
}

TEST(Conjugation, RandomStringsAgainstDense) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto terms = oracle::random_terms(3, 4, rng);
    const std::string p = oracle::random_label(3, rng);
    const double phi = ang(rng);
    const auto out = conjugate_by_string(AlgebraElement::from_labels(terms), PauliString::parse(p), phi);
    const oracle::M u = oracle::expm(kI * phi * oracle::label_matrix(p));
    const oracle::M expected = u * oracle::sum_matrix(terms, 3) * u.adjoint();
    EXPECT_LT(oracle::max_abs(element_matrix(out) - expected), 1e-12);
  }
}

TEST(Conjugation, MultiStringGeneratorIsContractError) {
  const AlgebraElement e(PauliString::parse("ZZ"));
  const AlgebraElement p = AlgebraElement::from_labels(
      std::vector<std::pair<std::string, double>>{{"XI", 1.0}, {"IX", 1.0}});
  EXPECT_THROW(conjugate_by_factor(e, p, 0.2, 1), ContractError);
}

TEST(AdjointK, ZeroThetaIsIdentity) {
  const CartanSplit split = split_for("tfim", 3);
  const Ansatz a = build_ansatz(split.k_basis, 3);
  const std::vector<double> zero(a.parameter_count(), 0.0);
  ModelSpec spec;
  spec.n = 3;
  const AlgebraElement h = build_model(spec);
  EXPECT_EQ(adjoint_k(a, zero, h, ConjugationSide::k_dagger_e_k), h);
  const DenseMatrix k = k_dense(a, zero);
  EXPECT_LT(oracle::max_abs(k - oracle::M::Identity(8, 8)), 1e-15);
}

TEST(AdjointK, MatchesDenseConjugation) {
  std::mt19937_64 rng(21);
  for (const auto& [name, n] : kModels) {
    const CartanSplit split = split_for(name, n);
    for (int order : {2, 4}) {
      const Ansatz a = build_ansatz(split.k_basis, order);
      for (int trial = 0; trial < 5; ++trial) {
        const auto theta = random_theta(a.parameter_count(), rng, 0.8);
        const auto terms = oracle::random_terms(n, 5, rng);
        const AlgebraElement e = AlgebraElement::from_labels(terms);
        const oracle::M k = oracle_k(a, theta);
        const oracle::M e_dense = oracle::sum_matrix(terms, n);
        const auto left = adjoint_k(a, theta, e, ConjugationSide::k_dagger_e_k);
        const auto right = adjoint_k(a, theta, e, ConjugationSide::k_e_k_dagger);
        EXPECT_LT(oracle::max_abs(element_matrix(left) - k.adjoint() * e_dense * k), 1e-10) << name;
        EXPECT_LT(oracle::max_abs(element_matrix(right) - k * e_dense * k.adjoint()), 1e-10) << name;
        const auto restored = adjoint_k(a, theta, left, ConjugationSide::k_e_k_dagger);
        EXPECT_LT((restored - e).max_abs_coeff(), 1e-10) << name;
      }
    }
  }
}

TEST(AdjointK, ThetaLengthMismatch) {
  const Ansatz a = build_ansatz(strings({"XY", "YX"}), 1);
  const std::vector<double> theta(3, 0.1);
  EXPECT_THROW(adjoint_k(a, theta, AlgebraElement(PauliString::parse("ZI")),
                         ConjugationSide::k_dagger_e_k),
               DimensionError);
  EXPECT_THROW(k_dense(a, theta), DimensionError);
}

TEST(KDense, SingleRotationClosedForm) {
  const double phi = 0.61;
  const DenseMatrix r = rotation_dense(PauliString::parse("X"), phi);
  EXPECT_NEAR(std::abs(r(0, 0) - std::cos(phi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r(0, 1) - kI * std::sin(phi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r(1, 0) - kI * std::sin(phi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r(1, 1) - std::cos(phi)), 0.0, 1e-15);
}

TEST(KDense, UnitaryAndMatchesOracle) {
  std::mt19937_64 rng(8);
  for (const auto& [name, n] : kModels) {
    const CartanSplit split = split_for(name, n);
    const Ansatz a = build_ansatz(split.k_basis, 4);
    for (int trial = 0; trial < 100; ++trial) {
      const auto theta = random_theta(a.parameter_count(), rng, 2.0);
      const DenseMatrix k = k_dense(a, theta);
      const Eigen::Index dim = k.rows();
      ASSERT_LT(oracle::max_abs(k.adjoint() * k - oracle::M::Identity(dim, dim)), 1e-10) << name;
      if (trial < 3) {
        EXPECT_LT(oracle::max_abs(k - oracle_k(a, theta)), 1e-10) << name;
      }
    }
  }
}

TEST(KDense, ResourceCap) {
  const Ansatz a = build_ansatz(strings({"XYI", "YXI"}), 1);
  const std::vector<double> theta(2, 0.1);
  EXPECT_THROW(k_dense(a, theta, 2), ResourceError);
}

TEST(Monomial, DerivativeMatchesDifference) {
  const Monomial m{-1.0 / 24.0, {0, 1, 1, 2}};
  std::vector<double> theta = {0.3, -0.8, 1.1};
  const double h = 1e-6;
  for (int p = 0; p < 3; ++p) {
    auto up = theta;
    auto dn = theta;
    up[static_cast<std::size_t>(p)] += h;
    dn[static_cast<std::size_t>(p)] -= h;
    const double fd = (m.value(up) - m.value(dn)) / (2 * h);
    EXPECT_NEAR(m.derivative(theta, p), fd, 1e-9);
  }
  EXPECT_EQ(m.exponents(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 1}}));
}
