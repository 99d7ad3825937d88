#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdsim/pauli.hpp"

namespace fdsim {

inline constexpr std::size_t kDefaultDlaCap = 4096;

/// Pauli-string basis of the dynamical Lie algebra, in canonical order.
struct DlaBasis {
  int n = 0;
  std::vector<PauliString> strings;

  std::size_t dimension() const noexcept { return strings.size(); }
  bool contains(const PauliString& p) const;
};

/// Closure of `terms` under the string bracket. Identity strings are dropped
/// (they are central and not part of su(2^n)).
DlaBasis generate_dla(std::span<const PauliString> terms, std::size_t cap = kDefaultDlaCap);

/// Eigenspaces of Theta(g) = -g^T acting on i*P: odd Y-parity strings are
/// fixed (k), even ones flip sign (m).
struct InvolutionSplit {
  std::vector<PauliString> k;
  std::vector<PauliString> m;
};

InvolutionSplit involution_split(const DlaBasis& dla);

/// Throws StructuralError listing every odd-parity term of `h`.
void check_hamiltonian_in_m(const AlgebraElement& h);

struct SubalgebraSplit {
  std::vector<PauliString> h;
  std::vector<PauliString> mtilde;
};

/// Greedy maximal abelian subalgebra of span(m). Seeds (Hamiltonian strings
/// lying in m) are scanned first in canonical order, then the rest of m.
SubalgebraSplit cartan_subalgebra(std::span<const PauliString> m,
                                  std::span<const PauliString> seeds);

struct CartanSplit {
  int n = 0;
  std::size_t dla_dim = 0;
  std::vector<PauliString> k_basis;
  std::vector<PauliString> h_basis;
  std::vector<PauliString> mtilde_basis;

  std::vector<PauliString> m_basis() const;
};

/// generate_dla -> involution_split -> check_hamiltonian_in_m -> cartan_subalgebra.
CartanSplit cartan_decompose(const AlgebraElement& hamiltonian,
                             std::size_t dla_cap = kDefaultDlaCap);

enum class CartanRelation { k_k_in_k, k_m_in_m, m_m_in_k };

const char* to_string(CartanRelation r);

struct CartanViolation {
  CartanRelation relation;
  PauliString left;
  PauliString right;
  PauliString result;
};

struct CartanReport {
  std::vector<CartanViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(CartanRelation r) const;
};

CartanReport verify_cartan_relations(const CartanSplit& split);

/// Pairs of h strings that fail to commute (empty for a valid split).
std::vector<std::pair<PauliString, PauliString>> abelian_violations(const CartanSplit& split);

/// For each m-tilde string, an h string it anticommutes with. An entry with
/// no witness means h is not maximal.
struct MaximalityWitness {
  PauliString element;
  std::optional<PauliString> witness;
};

std::vector<MaximalityWitness> certify_maximality(const CartanSplit& split);

}  // namespace fdsim
