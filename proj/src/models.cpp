#include "fdsim/models.hpp"

#include <algorithm>

#include "fdsim/error.hpp"

namespace fdsim {

namespace {

struct CouplingKey {
  const char* key;
  bool per_bond;
};

std::vector<CouplingKey> keys_for(const std::string& name) {
  if (name == "tfim") return {{"J", true}, {"h", false}};
  if (name == "xy") return {{"Jx", true}, {"Jy", true}};
  if (name == "tfxy") return {{"Jx", true}, {"Jy", true}, {"h", false}};
  if (name == "heisenberg") return {{"Jx", true}, {"Jy", true}, {"Jz", true}};
  if (name == "kitaev_even" || name == "kitaev_odd") return {{"J", true}};
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<double> expand(const ModelSpec& spec, const std::string& key, std::size_t len) {
  auto it = spec.couplings.find(key);
  if (it == spec.couplings.end() || it->second.empty()) return std::vector<double>(len, 1.0);
  if (it->second.size() == 1) return std::vector<double>(len, it->second.front());
  if (it->second.size() != len) {
    throw ConfigError("model " + spec.name + ": coupling '" + key + "' has " +
                      std::to_string(it->second.size()) + " values, expected 1 or " +
                      std::to_string(len));
  }
  return it->second;
}

PauliString two_site(int n, int a, int b, char letter) {
  std::string label(static_cast<std::size_t>(n), 'I');
  label[static_cast<std::size_t>(a)] = letter;
  label[static_cast<std::size_t>(b)] = letter;
  return PauliString::parse(label);
}

}  // namespace

const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("unknown boundary '" + s + "' (expected open|periodic)");
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"tfim",       "tfxy",        "xy",
                                                 "heisenberg", "kitaev_even", "kitaev_odd"};
  return names;
}

void ModelSpec::validate() const {
  const auto keys = keys_for(name);
  if (n < kMinSites || n > kMaxSites) {
    throw ConfigError("model " + name + ": n = " + std::to_string(n) + " outside [" +
                      std::to_string(kMinSites) + ", " + std::to_string(kMaxSites) + "]");
  }
  if (name == "kitaev_even" && n % 2 != 0) {
    throw ConfigError("kitaev_even needs an even number of sites (got " + std::to_string(n) + ")");
  }
  if (name == "kitaev_odd" && n % 2 == 0) {
    throw ConfigError("kitaev_odd needs an odd number of sites (got " + std::to_string(n) + ")");
  }
  if (boundary == Boundary::periodic && n < 3) {
    throw ConfigError("periodic boundary needs at least 3 sites");
  }
  for (const auto& [key, values] : couplings) {
    if (std::none_of(keys.begin(), keys.end(), [&](const CouplingKey& k) { return key == k.key; })) {
      throw ConfigError("model " + name + " has no coupling '" + key + "'");
    }
  }
  for (const auto& k : keys) {
    expand(*this, k.key, static_cast<std::size_t>(k.per_bond ? bond_count(*this) : n));
  }
}

int bond_count(const ModelSpec& spec) {
  return spec.boundary == Boundary::periodic ? spec.n : spec.n - 1;
}

AlgebraElement build_model(const ModelSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int bonds = bond_count(spec);
  const auto nb = static_cast<std::size_t>(bonds);
  std::vector<AlgebraElement::Term> terms;

  auto add_bonds = [&](const char* key, char letter) {
    const auto c = expand(spec, key, nb);
    for (int b = 0; b < bonds; ++b) {
      terms.emplace_back(two_site(n, b, (b + 1) % n, letter), c[static_cast<std::size_t>(b)]);
    }
  };
  auto add_field = [&](const char* key) {
    const auto c = expand(spec, key, static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      terms.emplace_back(PauliString::single(n, i, 'Z'), c[static_cast<std::size_t>(i)]);
    }
  };

  const std::string& name = spec.name;
  if (name == "tfim") {
    add_bonds("J", 'X');
    add_field("h");
  } else if (name == "xy" || name == "tfxy") {
    add_bonds("Jx", 'X');
    add_bonds("Jy", 'Y');
    if (name == "tfxy") add_field("h");
  } else if (name == "heisenberg") {
    add_bonds("Jx", 'X');
    add_bonds("Jy", 'Y');
    add_bonds("Jz", 'Z');
  } else {
    // Bond b joins sites b and b+1; with 1-based bond labels odd bonds are XX.
    const auto c = expand(spec, "J", nb);
    for (int b = 0; b < bonds; ++b) {
      terms.emplace_back(two_site(n, b, (b + 1) % n, b % 2 == 0 ? 'X' : 'Y'),
                         c[static_cast<std::size_t>(b)]);
    }
  }
  return AlgebraElement(n, std::move(terms));
}

int parity_matched_sites(const std::string& name, int n) {
  if (name == "kitaev_even" && n % 2 != 0) return n + 1;
  if (name == "kitaev_odd" && n % 2 == 0) return n + 1;
  return n;
}

}  // namespace fdsim
