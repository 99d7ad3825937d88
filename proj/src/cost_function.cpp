#include <cmath>
#include <unordered_map>

#include "fdsim/error.hpp"
#include "fdsim/optimize.hpp"

namespace fdsim {

CostFunction::CostFunction(const Ansatz& ansatz, const AlgebraElement& v, const AlgebraElement& h,
                           std::size_t basis_cap)
    : n_(ansatz.num_qubits()), params_(ansatz.parameter_count()) {
  if (v.num_qubits() != n_ || h.num_qubits() != n_) {
    throw DimensionError("CostFunction: qubit count mismatch between ansatz, v and H");
  }

  std::vector<PauliString> rot_strings;
  std::unordered_map<PauliString, std::uint32_t, PauliStringHash> plan_of;
  const auto& factors = ansatz.factors();
  for (std::uint32_t f = 0; f < factors.size(); ++f) {
    monomials_.push_back(factors[f].monomial);
    for (const auto& r : factors[f].rotations) {
      auto [it, fresh] = plan_of.try_emplace(r.string, static_cast<std::uint32_t>(rot_strings.size()));
      if (fresh) rot_strings.push_back(r.string);
      steps_.push_back({it->second, r.weight, f});
    }
  }

  // Closure of supp(v) + supp(H) under conjugation by every rotation string.
  std::unordered_map<PauliString, std::uint32_t, PauliStringHash> index;
  auto add = [&](const PauliString& p) {
    if (index.contains(p)) return;
    if (basis_.size() >= basis_cap) {
      throw CapacityError(basis_cap, "CostFunction: conjugation-closed basis exceeds " +
                                         std::to_string(basis_cap) + " strings");
    }
    index.emplace(p, static_cast<std::uint32_t>(basis_.size()));
    basis_.push_back(p);
  };
  for (const auto& t : v.terms()) add(t.first);
  for (const auto& t : h.terms()) add(t.first);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const PauliString q = basis_[i];
    for (const auto& p : rot_strings) {
      if (!p.commutes_with(q)) add(pauli_mul(p, q).string);
    }
  }

  plans_.resize(rot_strings.size());
  for (std::size_t pi = 0; pi < rot_strings.size(); ++pi) {
    const PauliString& p = rot_strings[pi];
    for (std::uint32_t q = 0; q < basis_.size(); ++q) {
      auto bq = bracket_strings(p, basis_[q]);
      if (!bq) continue;
      const std::uint32_t r = index.at(bq->string);
      if (q > r) continue;
      auto br = bracket_strings(p, basis_[r]);
      plans_[pi].push_back({q, r, 0.5 * bq->coeff, 0.5 * br->coeff});
    }
  }

  v_.assign(basis_.size(), 0.0);
  h_.assign(basis_.size(), 0.0);
  for (const auto& [p, c] : v.terms()) v_[index.at(p)] = c;
  for (const auto& [p, c] : h.terms()) h_[index.at(p)] = c;
}

void CostFunction::rotate(std::vector<double>& a, const std::vector<PlanePair>& plan,
                          double phi) const {
  if (phi == 0.0) return;
  const double c = std::cos(2.0 * phi);
  const double s = std::sin(2.0 * phi);
  for (const auto& pp : plan) {
    const double aq = a[pp.q];
    const double ar = a[pp.r];
    a[pp.q] = c * aq - s * pp.sigma_r * ar;
    a[pp.r] = c * ar - s * pp.sigma_q * aq;
  }
}

void CostFunction::angles(std::span<const double> theta, std::vector<double>& out) const {
  if (theta.size() != params_) {
    throw DimensionError("CostFunction: theta has " + std::to_string(theta.size()) +
                         " entries, expected " + std::to_string(params_));
  }
  std::vector<double> mono(monomials_.size());
  for (std::size_t f = 0; f < monomials_.size(); ++f) mono[f] = monomials_[f].value(theta);
  out.resize(steps_.size());
  for (std::size_t l = 0; l < steps_.size(); ++l) out[l] = steps_[l].weight * mono[steps_[l].factor];
}

double CostFunction::value(std::span<const double> theta) const {
  std::vector<double> ang;
  angles(theta, ang);
  std::vector<double> a = v_;
  for (std::size_t l = 0; l < steps_.size(); ++l) rotate(a, plans_[steps_[l].plan], -ang[l]);
  double f = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) f += a[q] * h_[q];
  return std::ldexp(f, n_);
}

double CostFunction::value_and_gradient(std::span<const double> theta,
                                        std::span<double> grad) const {
  if (grad.size() != params_) throw DimensionError("CostFunction: gradient buffer size mismatch");
  std::vector<double> ang;
  angles(theta, ang);

  std::vector<double> a = v_;
  for (std::size_t l = 0; l < steps_.size(); ++l) rotate(a, plans_[steps_[l].plan], -ang[l]);
  double f = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) f += a[q] * h_[q];

  // Reverse sweep: at step l, a = v_l (state after rotation l) and h = H_l,
  // and df/dangle_l = <⟦P_l, v_l⟧, H_l>. Both are un-rotated on the way back.
  std::vector<double> h = h_;
  std::vector<double> dfactor(monomials_.size(), 0.0);
  for (std::size_t l = steps_.size(); l-- > 0;) {
    const auto& plan = plans_[steps_[l].plan];
    double d = 0.0;
    for (const auto& pp : plan) {
      d += pp.sigma_q * a[pp.q] * h[pp.r] + pp.sigma_r * a[pp.r] * h[pp.q];
    }
    dfactor[steps_[l].factor] += 2.0 * d * steps_[l].weight;
    rotate(a, plan, ang[l]);
    rotate(h, plan, ang[l]);
  }

  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t fi = 0; fi < monomials_.size(); ++fi) {
    if (dfactor[fi] == 0.0) continue;
    for (const auto& [param, power] : monomials_[fi].exponents()) {
      grad[static_cast<std::size_t>(param)] += dfactor[fi] * monomials_[fi].derivative(theta, param);
    }
  }
  for (auto& g : grad) g = std::ldexp(g, n_);
  return std::ldexp(f, n_);
}

void CostFunction::central_difference(std::span<const double> theta, double step,
                                      std::span<double> grad) const {
  if (grad.size() != params_) throw DimensionError("CostFunction: gradient buffer size mismatch");
  std::vector<double> x(theta.begin(), theta.end());
  for (std::size_t i = 0; i < params_; ++i) {
    const double x0 = x[i];
    x[i] = x0 + step;
    const double fp = value(x);
    x[i] = x0 - step;
    const double fm = value(x);
    x[i] = x0;
    grad[i] = (fp - fm) / (2.0 * step);
  }
}

}  // namespace fdsim
