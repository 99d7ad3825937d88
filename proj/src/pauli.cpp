#include "fdsim/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "fdsim/error.hpp"

namespace fdsim {

namespace {

int popcount(std::uint64_t v) { return std::popcount(v); }

std::uint64_t mask(int n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

void require_same_n(int a, int b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": qubit count mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void require_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw DimensionError("qubit count " + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxQubits) + "]");
  }
}

// Reverses the low n bits so that site 0 becomes the most significant bit of a
// dense-matrix index (Kronecker order, site 0 leftmost).
std::uint64_t to_matrix_order(std::uint64_t bits, int n) {
  std::uint64_t out = 0;
  for (int i = 0; i < n; ++i) {
    if ((bits >> i) & 1ULL) out |= 1ULL << (n - 1 - i);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(int n) : n_(n) { require_qubits(n); }

PauliString::PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits)
    : x_(x_bits), z_(z_bits), n_(n) {
  require_qubits(n);
  if (((x_bits | z_bits) & ~mask(n)) != 0) {
    throw DimensionError("Pauli bits set beyond qubit count " + std::to_string(n));
  }
}

PauliString PauliString::parse(std::string_view label) {
  if (label.empty()) throw ParseError(0, "empty Pauli label");
  if (label.size() > static_cast<std::size_t>(kMaxQubits)) {
    throw ParseError(kMaxQubits, "Pauli label longer than " + std::to_string(kMaxQubits) +
                                     " sites at position " + std::to_string(kMaxQubits));
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    switch (label[i]) {
      case 'I': break;
      case 'X': x |= 1ULL << i; break;
      case 'Y': x |= 1ULL << i; z |= 1ULL << i; break;
      case 'Z': z |= 1ULL << i; break;
      default:
        throw ParseError(i, "invalid Pauli character '" + std::string(1, label[i]) +
                                "' at position " + std::to_string(i));
    }
  }
  return PauliString(static_cast<int>(label.size()), x, z);
}

PauliString PauliString::single(int n, int site, char letter) {
  if (site < 0 || site >= n) {
    throw DimensionError("site " + std::to_string(site) + " outside register of " +
                         std::to_string(n));
  }
  std::string label(static_cast<std::size_t>(n), 'I');
  label[static_cast<std::size_t>(site)] = letter;
  return parse(label);
}

char PauliString::site(int i) const {
  if (i < 0 || i >= n_) throw DimensionError("site index out of range");
  const bool x = (x_ >> i) & 1ULL;
  const bool z = (z_ >> i) & 1ULL;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::label() const {
  std::string out(static_cast<std::size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = site(i);
  return out;
}

int PauliString::y_count() const noexcept { return popcount(x_ & z_); }

int PauliString::weight() const noexcept { return popcount(x_ | z_); }

bool PauliString::commutes_with(const PauliString& other) const {
  require_same_n(n_, other.n_, "commutes_with");
  return (popcount((x_ & other.z_) ^ (z_ & other.x_)) & 1) == 0;
}

// ---------------------------------------------------------------------------
// Free functions on strings

PauliString parse_label(std::string_view label) { return PauliString::parse(label); }

PauliProduct pauli_mul(const PauliString& p, const PauliString& q) {
  require_same_n(p.num_qubits(), q.num_qubits(), "pauli_mul");
  // sigma(x,z) = i^{|x&z|} X^x Z^z and Z^z X^x = (-1)^{|z&x|} X^x Z^z.
  const std::uint64_t x = p.x_bits() ^ q.x_bits();
  const std::uint64_t z = p.z_bits() ^ q.z_bits();
  int k = popcount(p.x_bits() & p.z_bits()) + popcount(q.x_bits() & q.z_bits()) +
          2 * popcount(p.z_bits() & q.x_bits()) - popcount(x & z);
  k = ((k % 4) + 4) % 4;
  return {k, PauliString(p.num_qubits(), x, z)};
}

std::optional<StringBracket> bracket_strings(const PauliString& p, const PauliString& q) {
  if (p.commutes_with(q)) return std::nullopt;
  // -i(PQ - QP) = -2i PQ = -2 i^{k+1} R, and k is odd for anticommuting pairs.
  const PauliProduct prod = pauli_mul(p, q);
  const double coeff = prod.phase_power == 1 ? 2.0 : -2.0;
  return StringBracket{coeff, prod.string};
}

Parity y_parity(const PauliString& p) noexcept {
  return (p.y_count() & 1) ? Parity::odd : Parity::even;
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement::AlgebraElement(int n, double prune) : n_(n), prune_(prune) {
  require_qubits(n);
}

AlgebraElement::AlgebraElement(const PauliString& p, double coeff, double prune)
    : n_(p.num_qubits()), prune_(prune) {
  terms_.emplace_back(p, coeff);
  normalize();
}

AlgebraElement::AlgebraElement(int n, std::vector<Term> terms, double prune)
    : n_(n), prune_(prune), terms_(std::move(terms)) {
  require_qubits(n);
  for (const auto& [p, c] : terms_) require_same_n(n_, p.num_qubits(), "AlgebraElement");
  normalize();
}

AlgebraElement AlgebraElement::from_labels(
    std::span<const std::pair<std::string, double>> terms, double prune) {
  if (terms.empty()) throw ArgumentError("from_labels: no terms given");
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& [label, c] : terms) out.emplace_back(PauliString::parse(label), c);
  const int n = out.front().first.num_qubits();
  return AlgebraElement(n, std::move(out), prune);
}

void AlgebraElement::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [this](const Term& t) { return !(std::abs(t.second) >= prune_); });
  terms_ = std::move(merged);
}

double AlgebraElement::coeff(const PauliString& p) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const Term& t, const PauliString& key) { return t.first < key; });
  return (it != terms_.end() && it->first == p) ? it->second : 0.0;
}

bool AlgebraElement::contains(const PauliString& p) const { return coeff(p) != 0.0; }

std::vector<PauliString> AlgebraElement::support() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.first);
  return out;
}

double AlgebraElement::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.second));
  return m;
}

AlgebraElement AlgebraElement::operator-() const { return -1.0 * *this; }

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_n(a.n_, b.n_, "operator+");
  std::vector<AlgebraElement::Term> terms(a.terms_);
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return AlgebraElement(a.n_, std::move(terms), a.prune_);
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return a + (-1.0) * b;
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
  std::vector<AlgebraElement::Term> terms(a.terms_);
  for (auto& t : terms) t.second *= s;
  return AlgebraElement(a.n_, std::move(terms), a.prune_);
}

std::string AlgebraElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [p, c] : terms_) {
    if (!first) os << " + ";
    os << c << "*" << p.label();
    first = false;
  }
  return os.str();
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_n(a.num_qubits(), b.num_qubits(), "bracket");
  std::vector<AlgebraElement::Term> out;
  for (const auto& [p, cp] : a.terms()) {
    for (const auto& [q, cq] : b.terms()) {
      if (auto br = bracket_strings(p, q)) out.emplace_back(br->string, br->coeff * cp * cq);
    }
  }
  return AlgebraElement(a.num_qubits(), std::move(out), a.prune_threshold());
}

double hs_inner(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_n(a.num_qubits(), b.num_qubits(), "hs_inner");
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i].first < tb[j].first) {
      ++i;
    } else if (tb[j].first < ta[i].first) {
      ++j;
    } else {
      sum += ta[i].second * tb[j].second;
      ++i;
      ++j;
    }
  }
  return std::ldexp(sum, a.num_qubits());
}

double fro_norm(const AlgebraElement& a) { return std::sqrt(hs_inner(a, a)); }

AlgebraElement restrict_to(const AlgebraElement& a, std::span<const PauliString> keep) {
  std::vector<AlgebraElement::Term> out;
  for (const auto& t : a.terms()) {
    if (std::find(keep.begin(), keep.end(), t.first) != keep.end()) out.push_back(t);
  }
  return AlgebraElement(a.num_qubits(), std::move(out), a.prune_threshold());
}

namespace {

void require_dense_cap(int n, int cap) {
  if (n > cap) {
    throw ResourceError("dense conversion of " + std::to_string(n) +
                        " qubits exceeds the cap of " + std::to_string(cap));
  }
}

}  // namespace

PauliAction pauli_action(const PauliString& p, int qubit_cap) {
  const int n = p.num_qubits();
  require_dense_cap(n, qubit_cap);
  const std::uint64_t xm = to_matrix_order(p.x_bits(), n);
  const std::uint64_t zm = to_matrix_order(p.z_bits(), n);
  static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex base = kIPow[p.y_count() % 4];
  const std::uint64_t dim = 1ULL << n;
  PauliAction a;
  a.row.resize(dim);
  a.phase.resize(dim);
  for (std::uint64_t c = 0; c < dim; ++c) {
    a.row[c] = c ^ xm;
    a.phase[c] = (popcount(c & zm) & 1) ? -base : base;
  }
  return a;
}

DenseMatrix multiply_right(const DenseMatrix& m, const PauliString& p) {
  const PauliAction a = pauli_action(p);
  if (static_cast<std::uint64_t>(m.cols()) != a.row.size()) {
    throw DimensionError("multiply_right: matrix and Pauli string sizes differ");
  }
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < a.row.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = m.col(static_cast<Eigen::Index>(a.row[c])) * a.phase[c];
  }
  return out;
}

DenseMatrix to_dense(const PauliString& p, int qubit_cap) {
  return to_dense(AlgebraElement(p), qubit_cap);
}

DenseMatrix to_dense(const AlgebraElement& a, int qubit_cap) {
  require_dense_cap(a.num_qubits(), qubit_cap);
  const Eigen::Index dim = Eigen::Index{1} << a.num_qubits();
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  for (const auto& [p, c] : a.terms()) {
    const PauliAction act = pauli_action(p, qubit_cap);
    for (std::size_t col = 0; col < act.row.size(); ++col) {
      m(static_cast<Eigen::Index>(act.row[col]), static_cast<Eigen::Index>(col)) += act.phase[col] * c;
    }
  }
  return m;
}

}  // namespace fdsim
