#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fdsim/pauli.hpp"

namespace fdsim {

inline constexpr int kMaxOrder = 4;

/// Which third/fourth-order coefficients to use. `standard` is the textbook
/// Zassenhaus expansion; `printed` reproduces the alternative weights
/// (1/6 on both third-order shapes, and the matching degree-4 variant).
enum class CoefficientConvention { standard, printed };

const char* to_string(CoefficientConvention c);
CoefficientConvention coefficient_convention_from_string(const std::string& s);

/// A weighted nested commutator. `shape` lists operand slots from the
/// outermost bracket inward: {a, b, c, d} means [a, [b, [c, d]]].
struct BracketTerm {
  std::vector<int> shape;
  double weight = 0.0;
};

struct CoefficientTable {
  int order = 0;
  /// W_order for exp(A + B) with slots A = 0, B = 1.
  std::vector<BracketTerm> two_generator;
  /// Correction block for the multi-generator ansatz; slots index the sorted
  /// index tuple (i < j for orders 2-3, i < j < k < l for order 4).
  std::vector<BracketTerm> multivariate;
};

/// Scalar coefficients attached to each nested-bracket shape at `order` (2..4).
CoefficientTable truncation_coefficients(int order,
                                         CoefficientConvention conv = CoefficientConvention::standard);

/// Hermitian generator G of the anti-Hermitian nested commutator of the
/// operands i*X_a: [iX_a, [iX_b, ...]] = i * G. Depth d gives
/// G = (-1)^{d-1} ⟦X_a, ⟦X_b, ...⟧⟧.
AlgebraElement nested_generator(std::span<const int> shape,
                                std::span<const AlgebraElement> operands);

enum class FactorKind { linear, pair, triple_a, triple_b, quad };

const char* to_string(FactorKind k);

/// scale * prod_{idx in indices} theta[idx]; indices are sorted, repeats allowed.
struct Monomial {
  double scale = 1.0;
  std::vector<int> indices;

  double value(std::span<const double> theta) const;
  double derivative(std::span<const double> theta, int param) const;
  /// Exponent of each parameter appearing in the monomial, as (index, power).
  std::vector<std::pair<int, int>> exponents() const;
};

/// exp(i * weight * monomial(theta) * string).
struct Rotation {
  PauliString string;
  double weight = 0.0;
};

/// One factor exp(i * monomial(theta) * generator) of K(theta). Multi-string
/// generators are realized as the product of their single-string rotations
/// in canonical order.
struct Factor {
  FactorKind kind = FactorKind::linear;
  std::vector<int> index;
  AlgebraElement generator;
  Monomial monomial;
  std::vector<Rotation> rotations;
};

struct BlockCounts {
  std::size_t linear = 0;
  std::size_t pair = 0;
  std::size_t triple = 0;
  std::size_t quad = 0;
};

/// K(theta) = F_1 F_2 ... F_L with the Linear block first, then Pair, Triple
/// and Quad blocks, each in lexicographic index order.
class Ansatz {
 public:
  Ansatz(int n, int order, CoefficientConvention conv, std::vector<PauliString> k_basis,
         std::vector<Factor> factors);

  int num_qubits() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  CoefficientConvention convention() const noexcept { return conv_; }
  const std::vector<PauliString>& k_basis() const noexcept { return k_basis_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t parameter_count() const noexcept { return k_basis_.size(); }
  std::size_t rotation_count() const noexcept;
  BlockCounts block_counts() const;

 private:
  int n_;
  int order_;
  CoefficientConvention conv_;
  std::vector<PauliString> k_basis_;
  std::vector<Factor> factors_;
};

Ansatz build_ansatz(std::span<const PauliString> k_basis, int order,
                    CoefficientConvention conv = CoefficientConvention::standard);

enum class ConjugationSide {
  k_dagger_e_k,  // K^dagger E K
  k_e_k_dagger,  // K E K^dagger
};

/// exp(i*direction*angle*P) E exp(-i*direction*angle*P) for a single-string
/// `p_sum` (its coefficient scales the angle). Throws ContractError otherwise.
AlgebraElement conjugate_by_factor(const AlgebraElement& e, const AlgebraElement& p_sum,
                                   double angle, int direction);

/// Same rotation with an explicit string; `phi` already includes the direction.
AlgebraElement conjugate_by_string(const AlgebraElement& e, const PauliString& p, double phi);

AlgebraElement adjoint_k(const Ansatz& ansatz, std::span<const double> theta,
                         const AlgebraElement& e, ConjugationSide side);

DenseMatrix k_dense(const Ansatz& ansatz, std::span<const double> theta,
                    int qubit_cap = kDenseQubitCap);

/// cos(a) I + i sin(a) P.
DenseMatrix rotation_dense(const PauliString& p, double angle, int qubit_cap = kDenseQubitCap);

}  // namespace fdsim
