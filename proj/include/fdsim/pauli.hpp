#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fdsim {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 12;
inline constexpr int kDenseQubitCap = 12;
inline constexpr double kDefaultPrune = 1e-14;

/// n-qubit Pauli string in symplectic form. Bit i of x/z describes site i
/// (site 0 is the leftmost character of the label):
///   (x,z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);
  PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits);

  /// Parses an I/X/Y/Z label. Throws ParseError naming the bad position.
  static PauliString parse(std::string_view label);
  /// Single-site operator `letter` on site `site` of an n-qubit register.
  static PauliString single(int n, int site, char letter);

  int num_qubits() const noexcept { return n_; }
  std::uint64_t x_bits() const noexcept { return x_; }
  std::uint64_t z_bits() const noexcept { return z_; }

  char site(int i) const;
  std::string label() const;
  bool is_identity() const noexcept { return (x_ | z_) == 0; }
  int y_count() const noexcept;
  int weight() const noexcept;
  bool commutes_with(const PauliString& other) const;

  /// Canonical order: (n, z_bits, x_bits) as unsigned integers.
  friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) noexcept {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    if (auto c = a.z_ <=> b.z_; c != 0) return c;
    return a.x_ <=> b.x_;
  }
  friend bool operator==(const PauliString&, const PauliString&) noexcept = default;

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int n_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept {
    std::uint64_t h = p.x_bits() * 0x9E3779B97F4A7C15ULL;
    h ^= (p.z_bits() + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
    h ^= static_cast<std::uint64_t>(p.num_qubits()) << 58;
    return static_cast<std::size_t>(h);
  }
};

/// i^phase_power * string.
struct PauliProduct {
  int phase_power = 0;
  PauliString string;
};

/// Result of the adapted bracket of two anticommuting strings:
/// -i[P,Q] = coeff * string, coeff in {+2, -2}.
struct StringBracket {
  double coeff = 0.0;
  PauliString string;
};

enum class Parity { even, odd };

PauliString parse_label(std::string_view label);
PauliProduct pauli_mul(const PauliString& p, const PauliString& q);
std::optional<StringBracket> bracket_strings(const PauliString& p, const PauliString& q);
Parity y_parity(const PauliString& p) noexcept;

/// Real-weighted sum of Pauli strings, representing the Hermitian operator
/// sum_P c_P P. Terms are kept in canonical order with no coefficient below
/// the prune threshold.
class AlgebraElement {
 public:
  using Term = std::pair<PauliString, double>;

  explicit AlgebraElement(int n = 1, double prune = kDefaultPrune);
  AlgebraElement(const PauliString& p, double coeff = 1.0, double prune = kDefaultPrune);
  /// Duplicate strings are summed.
  AlgebraElement(int n, std::vector<Term> terms, double prune = kDefaultPrune);

  /// Parses entries like {{"XX", 1.0}, {"ZI", 0.5}}.
  static AlgebraElement from_labels(std::span<const std::pair<std::string, double>> terms,
                                    double prune = kDefaultPrune);

  int num_qubits() const noexcept { return n_; }
  double prune_threshold() const noexcept { return prune_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  double coeff(const PauliString& p) const;
  bool contains(const PauliString& p) const;
  std::vector<PauliString> support() const;
  /// Largest coefficient magnitude (0 for the zero element).
  double max_abs_coeff() const noexcept;

  AlgebraElement operator-() const;
  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(double s, const AlgebraElement& a);
  friend AlgebraElement operator*(const AlgebraElement& a, double s) { return s * a; }

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void normalize();

  int n_;
  double prune_;
  std::vector<Term> terms_;
};

/// Adapted bracket -i[A,B]; bilinear, real-valued on real-weighted sums.
AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);
/// tr(dense(A) dense(B)) = 2^n sum_P a_P b_P.
double hs_inner(const AlgebraElement& a, const AlgebraElement& b);
/// sqrt(hs_inner(A, A)).
double fro_norm(const AlgebraElement& a);
/// Keeps only the terms whose string is in `keep`.
AlgebraElement restrict_to(const AlgebraElement& a, std::span<const PauliString> keep);

/// Column action of a Pauli string on the computational basis:
/// P|c> = phase[c] |row[c]>, with site 0 the most significant index bit.
struct PauliAction {
  std::vector<std::uint64_t> row;
  std::vector<Complex> phase;
};

PauliAction pauli_action(const PauliString& p, int qubit_cap = kDenseQubitCap);

/// M * P without forming P densely.
DenseMatrix multiply_right(const DenseMatrix& m, const PauliString& p);

DenseMatrix to_dense(const PauliString& p, int qubit_cap = kDenseQubitCap);
DenseMatrix to_dense(const AlgebraElement& a, int qubit_cap = kDenseQubitCap);

}  // namespace fdsim

template <>
struct std::hash<fdsim::PauliString> : fdsim::PauliStringHash {};
