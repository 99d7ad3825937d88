#pragma once

#include <map>
#include <string>
#include <vector>

#include "fdsim/pauli.hpp"

namespace fdsim {

enum class Boundary { open, periodic };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

inline constexpr int kMinSites = 2;
inline constexpr int kMaxSites = 10;

/// Coupling keys per model: tfim {J, h}; xy {Jx, Jy}; tfxy {Jx, Jy, h};
/// heisenberg {Jx, Jy, Jz}; kitaev_even / kitaev_odd {J}. Bond keys take one
/// value per bond, field keys one per site. An empty vector means all ones and
/// a single value is broadcast.
struct ModelSpec {
  std::string name = "tfim";
  int n = 4;
  std::map<std::string, std::vector<double>> couplings;
  Boundary boundary = Boundary::open;

  void validate() const;
};

const std::vector<std::string>& model_names();

/// Bond b joins sites b and b+1; the periodic closing bond is (n-1, 0).
int bond_count(const ModelSpec& spec);

AlgebraElement build_model(const ModelSpec& spec);

/// Smallest n >= requested whose parity suits the model (kitaev_even wants
/// even n, kitaev_odd odd n); other models return n unchanged.
int parity_matched_sites(const std::string& name, int n);

}  // namespace fdsim
