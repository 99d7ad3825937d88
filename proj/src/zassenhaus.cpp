#include "fdsim/zassenhaus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>

#include "fdsim/error.hpp"

namespace fdsim {

const char* to_string(CoefficientConvention c) {
  return c == CoefficientConvention::standard ? "standard" : "printed";
}

CoefficientConvention coefficient_convention_from_string(const std::string& s) {
  if (s == "standard") return CoefficientConvention::standard;
  if (s == "printed") return CoefficientConvention::printed;
  throw ConfigError("unknown coefficient convention '" + s + "' (expected standard|printed)");
}

const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::linear: return "linear";
    case FactorKind::pair: return "pair";
    case FactorKind::triple_a: return "triple_a";
    case FactorKind::triple_b: return "triple_b";
    case FactorKind::quad: return "quad";
  }
  return "?";
}

CoefficientTable truncation_coefficients(int order, CoefficientConvention conv) {
  CoefficientTable t;
  t.order = order;
  const bool printed = conv == CoefficientConvention::printed;
  switch (order) {
    case 2:
      t.two_generator = {{{0, 1}, -0.5}};
      t.multivariate = t.two_generator;
      break;
    case 3:
      t.two_generator = {{{0, 0, 1}, 1.0 / 6.0}, {{1, 0, 1}, printed ? 1.0 / 6.0 : 1.0 / 3.0}};
      t.multivariate = t.two_generator;
      break;
    case 4:
      if (printed) {
        t.two_generator = {{{0, 0, 0, 1}, -1.0 / 24.0},
                           {{0, 1, 1, 0}, -3.0 / 24.0},
                           {{1, 1, 1, 0}, -1.0 / 24.0}};
      } else {
        t.two_generator = {{{0, 0, 0, 1}, -1.0 / 24.0},
                           {{1, 0, 0, 1}, -3.0 / 24.0},
                           {{1, 1, 0, 1}, -3.0 / 24.0}};
      }
      // C4(i,j,k,l) = [i,[j,[k,l]]] + 3[i,[l,[j,k]]] + 3[j,[k,[l,i]]] + [l,[j,[k,i]]]
      t.multivariate = {{{0, 1, 2, 3}, -1.0 / 24.0},
                        {{0, 3, 1, 2}, -3.0 / 24.0},
                        {{1, 2, 3, 0}, -3.0 / 24.0},
                        {{3, 1, 2, 0}, -1.0 / 24.0}};
      break;
    default:
      throw ArgumentError("truncation_coefficients: order must be 2, 3 or 4 (got " +
                          std::to_string(order) + ")");
  }
  return t;
}

AlgebraElement nested_generator(std::span<const int> shape,
                                std::span<const AlgebraElement> operands) {
  if (shape.size() < 2) throw ArgumentError("nested_generator: shape needs two or more slots");
  for (int s : shape) {
    if (s < 0 || static_cast<std::size_t>(s) >= operands.size()) {
      throw ArgumentError("nested_generator: slot out of range");
    }
  }
  AlgebraElement cur = operands[static_cast<std::size_t>(shape.back())];
  for (std::size_t i = shape.size() - 1; i-- > 0;) {
    cur = bracket(operands[static_cast<std::size_t>(shape[i])], cur);
  }
  return (shape.size() % 2 == 0) ? -cur : cur;
}

// ---------------------------------------------------------------------------
// Monomial

double Monomial::value(std::span<const double> theta) const {
  double v = scale;
  for (int i : indices) v *= theta[static_cast<std::size_t>(i)];
  return v;
}

double Monomial::derivative(std::span<const double> theta, int param) const {
  int power = 0;
  double rest = scale;
  bool skipped = false;
  for (int i : indices) {
    if (i == param) {
      ++power;
      if (!skipped) {
        skipped = true;
        continue;
      }
    }
    rest *= theta[static_cast<std::size_t>(i)];
  }
  return power == 0 ? 0.0 : rest * power;
}

std::vector<std::pair<int, int>> Monomial::exponents() const {
  std::vector<std::pair<int, int>> out;
  for (int i : indices) {
    if (!out.empty() && out.back().first == i) {
      ++out.back().second;
    } else {
      out.emplace_back(i, 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ansatz

Ansatz::Ansatz(int n, int order, CoefficientConvention conv, std::vector<PauliString> k_basis,
               std::vector<Factor> factors)
    : n_(n),
      order_(order),
      conv_(conv),
      k_basis_(std::move(k_basis)),
      factors_(std::move(factors)) {}

std::size_t Ansatz::rotation_count() const noexcept {
  std::size_t c = 0;
  for (const auto& f : factors_) c += f.rotations.size();
  return c;
}

BlockCounts Ansatz::block_counts() const {
  BlockCounts b;
  for (const auto& f : factors_) {
    switch (f.kind) {
      case FactorKind::linear: ++b.linear; break;
      case FactorKind::pair: ++b.pair; break;
      case FactorKind::triple_a:
      case FactorKind::triple_b: ++b.triple; break;
      case FactorKind::quad: ++b.quad; break;
    }
  }
  return b;
}

namespace {

Factor make_factor(FactorKind kind, std::vector<int> index, AlgebraElement generator,
                   Monomial monomial) {
  Factor f{kind, std::move(index), std::move(generator), std::move(monomial), {}};
  for (const auto& [p, c] : f.generator.terms()) f.rotations.push_back({p, c});
  return f;
}

void for_each_tuple(int d, int arity, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(arity));
  for (int i = 0; i < arity; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (arity > d) return;
  while (true) {
    fn(idx);
    int pos = arity - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == d - arity + pos) --pos;
    if (pos < 0) return;
    ++idx[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < arity; ++q) {
      idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
}

// Appends the correction block of `order` to `factors`.
void append_block(int order, CoefficientConvention conv, std::span<const AlgebraElement> k,
                  std::vector<Factor>& factors) {
  const CoefficientTable table = truncation_coefficients(order, conv);
  const int arity = order == 4 ? 4 : 2;
  const int d = static_cast<int>(k.size());

  for_each_tuple(d, arity, [&](const std::vector<int>& tuple) {
    std::vector<AlgebraElement> ops;
    ops.reserve(tuple.size());
    for (int i : tuple) ops.push_back(k[static_cast<std::size_t>(i)]);

    // Shapes sharing a monomial are merged into one factor, scaled by the
    // weight of the first shape in the group.
    struct Group {
      std::vector<int> monomial;
      double lead = 0.0;
      std::vector<AlgebraElement::Term> terms;
    };
    std::vector<Group> groups;
    for (const auto& bt : table.multivariate) {
      std::vector<int> mono;
      for (int s : bt.shape) mono.push_back(tuple[static_cast<std::size_t>(s)]);
      std::sort(mono.begin(), mono.end());
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const Group& g) { return g.monomial == mono; });
      if (it == groups.end()) {
        groups.push_back({mono, bt.weight, {}});
        it = std::prev(groups.end());
      }
      const AlgebraElement g = nested_generator(bt.shape, ops);
      for (const auto& [p, c] : g.terms()) it->terms.emplace_back(p, c * bt.weight / it->lead);
    }

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      AlgebraElement gen(k.front().num_qubits(), std::move(groups[gi].terms));
      if (gen.empty()) continue;
      FactorKind kind = FactorKind::pair;
      if (order == 3) kind = gi == 0 ? FactorKind::triple_a : FactorKind::triple_b;
      if (order == 4) kind = FactorKind::quad;
      factors.push_back(make_factor(kind, tuple, std::move(gen),
                                    Monomial{groups[gi].lead, groups[gi].monomial}));
    }
  });
}

}  // namespace

Ansatz build_ansatz(std::span<const PauliString> k_basis, int order, CoefficientConvention conv) {
  if (order < 1 || order > kMaxOrder) {
    throw ArgumentError("build_ansatz: order must be in 1..4 (got " + std::to_string(order) + ")");
  }
  if (k_basis.empty()) throw ArgumentError("build_ansatz: empty k basis");
  const int n = k_basis.front().num_qubits();
  std::vector<PauliString> basis(k_basis.begin(), k_basis.end());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].num_qubits() != n) throw DimensionError("build_ansatz: mixed qubit counts");
    for (std::size_t j = 0; j < i; ++j) {
      if (basis[i] == basis[j]) {
        throw ArgumentError("build_ansatz: duplicate basis string " + basis[i].label());
      }
    }
  }

  std::vector<AlgebraElement> k;
  k.reserve(basis.size());
  for (const auto& p : basis) k.emplace_back(p);

  std::vector<Factor> factors;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int idx = static_cast<int>(i);
    factors.push_back(make_factor(FactorKind::linear, {idx}, k[i], Monomial{1.0, {idx}}));
  }
  for (int r = 2; r <= order; ++r) append_block(r, conv, k, factors);
  return Ansatz(n, order, conv, std::move(basis), std::move(factors));
}

// ---------------------------------------------------------------------------
// Adjoint action

AlgebraElement conjugate_by_string(const AlgebraElement& e, const PauliString& p, double phi) {
  if (phi == 0.0) return e;
  const double c = std::cos(2.0 * phi);
  const double s = std::sin(2.0 * phi);
  std::vector<AlgebraElement::Term> out;
  out.reserve(2 * e.size());
  for (const auto& [q, coeff] : e.terms()) {
    auto br = bracket_strings(p, q);
    if (!br) {
      out.emplace_back(q, coeff);
      continue;
    }
    // exp(i phi P) Q exp(-i phi P) = cos(2 phi) Q - sin(2 phi) * (1/2) ⟦P, Q⟧
    out.emplace_back(q, c * coeff);
    out.emplace_back(br->string, -s * 0.5 * br->coeff * coeff);
  }
  return AlgebraElement(e.num_qubits(), std::move(out), e.prune_threshold());
}

AlgebraElement conjugate_by_factor(const AlgebraElement& e, const AlgebraElement& p_sum,
                                   double angle, int direction) {
  if (p_sum.size() != 1) {
    throw ContractError("conjugate_by_factor: analytic path needs a single-string generator (got " +
                        std::to_string(p_sum.size()) + " strings)");
  }
  if (direction != 1 && direction != -1) {
    throw ArgumentError("conjugate_by_factor: direction must be +1 or -1");
  }
  const auto& [p, w] = p_sum.terms().front();
  return conjugate_by_string(e, p, direction * angle * w);
}

namespace {

void require_theta(const Ansatz& a, std::span<const double> theta) {
  if (theta.size() != a.parameter_count()) {
    throw DimensionError("theta has " + std::to_string(theta.size()) + " entries, ansatz expects " +
                         std::to_string(a.parameter_count()));
  }
}

}  // namespace

AlgebraElement adjoint_k(const Ansatz& ansatz, std::span<const double> theta,
                         const AlgebraElement& e, ConjugationSide side) {
  require_theta(ansatz, theta);
  if (e.num_qubits() != ansatz.num_qubits()) throw DimensionError("adjoint_k: qubit mismatch");

  AlgebraElement cur = e;
  const auto& factors = ansatz.factors();
  if (side == ConjugationSide::k_dagger_e_k) {
    for (const auto& f : factors) {
      const double m = f.monomial.value(theta);
      for (const auto& r : f.rotations) cur = conjugate_by_string(cur, r.string, -m * r.weight);
    }
  } else {
    for (auto f = factors.rbegin(); f != factors.rend(); ++f) {
      const double m = f->monomial.value(theta);
      for (auto r = f->rotations.rbegin(); r != f->rotations.rend(); ++r) {
        cur = conjugate_by_string(cur, r->string, m * r->weight);
      }
    }
  }
  return cur;
}

DenseMatrix rotation_dense(const PauliString& p, double angle, int qubit_cap) {
  DenseMatrix m = Complex(0.0, std::sin(angle)) * to_dense(p, qubit_cap);
  m.diagonal().array() += std::cos(angle);
  return m;
}

DenseMatrix k_dense(const Ansatz& ansatz, std::span<const double> theta, int qubit_cap) {
  require_theta(ansatz, theta);
  if (ansatz.num_qubits() > qubit_cap) {
    throw ResourceError("k_dense: " + std::to_string(ansatz.num_qubits()) +
                        " qubits exceeds the dense cap of " + std::to_string(qubit_cap));
  }
  const Eigen::Index dim = Eigen::Index{1} << ansatz.num_qubits();
  DenseMatrix k = DenseMatrix::Identity(dim, dim);
  for (const auto& f : ansatz.factors()) {
    const double m = f.monomial.value(theta);
    for (const auto& r : f.rotations) {
      const double angle = m * r.weight;
      if (angle == 0.0) continue;
      k = std::cos(angle) * k + Complex(0.0, std::sin(angle)) * multiply_right(k, r.string);
    }
  }
  return k;
}

}  // namespace fdsim
