#include "fdsim/lie.hpp"

#include <algorithm>
#include <unordered_set>

#include "fdsim/error.hpp"

namespace fdsim {

bool DlaBasis::contains(const PauliString& p) const {
  return std::binary_search(strings.begin(), strings.end(), p);
}

DlaBasis generate_dla(std::span<const PauliString> terms, std::size_t cap) {
  if (terms.empty()) throw ArgumentError("generate_dla: empty term list");
  const int n = terms.front().num_qubits();

  std::vector<PauliString> basis;
  std::unordered_set<PauliString, PauliStringHash> seen;
  for (const auto& t : terms) {
    if (t.num_qubits() != n) throw DimensionError("generate_dla: mixed qubit counts");
    if (t.is_identity() || !seen.insert(t).second) continue;
    basis.push_back(t);
  }
  if (basis.size() > cap) {
    throw CapacityError(cap, "DLA exceeds capacity cap of " + std::to_string(cap) + " strings");
  }

  // Worklist sweep: each string is bracketed once against every earlier one.
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      auto br = bracket_strings(basis[i], basis[j]);
      if (!br || seen.contains(br->string)) continue;
      if (basis.size() >= cap) {
        throw CapacityError(cap,
                            "DLA exceeds capacity cap of " + std::to_string(cap) + " strings");
      }
      seen.insert(br->string);
      basis.push_back(br->string);
    }
  }
  std::sort(basis.begin(), basis.end());
  return DlaBasis{n, std::move(basis)};
}

InvolutionSplit involution_split(const DlaBasis& dla) {
  InvolutionSplit out;
  for (const auto& p : dla.strings) {
    (y_parity(p) == Parity::odd ? out.k : out.m).push_back(p);
  }
  return out;
}

void check_hamiltonian_in_m(const AlgebraElement& h) {
  std::vector<std::string> offenders;
  for (const auto& [p, c] : h.terms()) {
    if (y_parity(p) == Parity::odd) offenders.push_back(p.label());
  }
  if (offenders.empty()) return;
  std::string msg = "Hamiltonian not in m under Theta(g) = -g^T; odd Y-parity terms:";
  for (const auto& o : offenders) msg += " " + o;
  throw StructuralError(msg, std::move(offenders));
}

SubalgebraSplit cartan_subalgebra(std::span<const PauliString> m,
                                  std::span<const PauliString> seeds) {
  if (m.empty()) throw StructuralError("cartan_subalgebra: m is empty");

  std::vector<PauliString> sorted_m(m.begin(), m.end());
  std::sort(sorted_m.begin(), sorted_m.end());
  std::vector<PauliString> sorted_seeds;
  for (const auto& s : seeds) {
    if (std::binary_search(sorted_m.begin(), sorted_m.end(), s)) sorted_seeds.push_back(s);
  }
  std::sort(sorted_seeds.begin(), sorted_seeds.end());
  sorted_seeds.erase(std::unique(sorted_seeds.begin(), sorted_seeds.end()), sorted_seeds.end());

  std::vector<PauliString> order = sorted_seeds;
  for (const auto& p : sorted_m) {
    if (!std::binary_search(sorted_seeds.begin(), sorted_seeds.end(), p)) order.push_back(p);
  }

  SubalgebraSplit out;
  for (const auto& p : order) {
    const bool commutes = std::all_of(out.h.begin(), out.h.end(),
                                      [&](const PauliString& q) { return p.commutes_with(q); });
    if (commutes) out.h.push_back(p);
  }
  std::sort(out.h.begin(), out.h.end());
  for (const auto& p : sorted_m) {
    if (!std::binary_search(out.h.begin(), out.h.end(), p)) out.mtilde.push_back(p);
  }
  return out;
}

std::vector<PauliString> CartanSplit::m_basis() const {
  std::vector<PauliString> out(h_basis);
  out.insert(out.end(), mtilde_basis.begin(), mtilde_basis.end());
  std::sort(out.begin(), out.end());
  return out;
}

CartanSplit cartan_decompose(const AlgebraElement& hamiltonian, std::size_t dla_cap) {
  const auto terms = hamiltonian.support();
  if (terms.empty()) throw StructuralError("cartan_decompose: Hamiltonian has no terms");
  check_hamiltonian_in_m(hamiltonian);
  DlaBasis dla = generate_dla(terms, dla_cap);
  InvolutionSplit inv = involution_split(dla);
  SubalgebraSplit sub = cartan_subalgebra(inv.m, terms);
  return CartanSplit{dla.n, dla.dimension(), std::move(inv.k), std::move(sub.h),
                     std::move(sub.mtilde)};
}

const char* to_string(CartanRelation r) {
  switch (r) {
    case CartanRelation::k_k_in_k: return "[k,k] in k";
    case CartanRelation::k_m_in_m: return "[k,m] in m";
    case CartanRelation::m_m_in_k: return "[m,m] in k";
  }
  return "?";
}

std::size_t CartanReport::count(CartanRelation r) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [r](const CartanViolation& v) { return v.relation == r; }));
}

CartanReport verify_cartan_relations(const CartanSplit& split) {
  std::vector<PauliString> k(split.k_basis);
  std::vector<PauliString> m = split.m_basis();
  std::sort(k.begin(), k.end());

  auto in = [](const std::vector<PauliString>& set, const PauliString& p) {
    return std::binary_search(set.begin(), set.end(), p);
  };

  CartanReport report;
  auto check = [&](const std::vector<PauliString>& a, const std::vector<PauliString>& b,
                   const std::vector<PauliString>& target, CartanRelation rel, bool triangular) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = triangular ? i + 1 : 0; j < b.size(); ++j) {
        auto br = bracket_strings(a[i], b[j]);
        if (br && !in(target, br->string)) {
          report.violations.push_back({rel, a[i], b[j], br->string});
        }
      }
    }
  };
  check(k, k, k, CartanRelation::k_k_in_k, true);
  check(k, m, m, CartanRelation::k_m_in_m, false);
  check(m, m, k, CartanRelation::m_m_in_k, true);
  return report;
}

std::vector<std::pair<PauliString, PauliString>> abelian_violations(const CartanSplit& split) {
  std::vector<std::pair<PauliString, PauliString>> out;
  const auto& h = split.h_basis;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      if (!h[i].commutes_with(h[j])) out.emplace_back(h[i], h[j]);
    }
  }
  return out;
}

std::vector<MaximalityWitness> certify_maximality(const CartanSplit& split) {
  std::vector<MaximalityWitness> out;
  for (const auto& p : split.mtilde_basis) {
    MaximalityWitness w{p, std::nullopt};
    for (const auto& q : split.h_basis) {
      if (!p.commutes_with(q)) {
        w.witness = q;
        break;
      }
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace fdsim
