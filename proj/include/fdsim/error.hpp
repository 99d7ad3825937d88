#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fdsim {

// Error categories map one-to-one onto CLI exit codes (see runner.hpp).
enum class ErrorKind {
  parse,
  dimension,
  resource,
  capacity,
  argument,
  config,
  structural,
  contract,
  optimizer,
  numerical,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::parse, what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::dimension, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(ErrorKind::resource, what) {}
};

class CapacityError : public Error {
 public:
  CapacityError(std::size_t cap, const std::string& what)
      : Error(ErrorKind::capacity, what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

/// Raised when the algebraic structure required by the pipeline is absent,
/// e.g. a Hamiltonian term outside m. `offenders` holds Pauli labels.
class StructuralError : public Error {
 public:
  StructuralError(const std::string& what, std::vector<std::string> offenders = {})
      : Error(ErrorKind::structural, what), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const noexcept { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(ErrorKind::contract, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long iteration = -1)
      : Error(ErrorKind::numerical, what), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

/// Line search could not find an acceptable step. Carries the best point seen.
class StagnationError : public Error {
 public:
  StagnationError(const std::string& what, std::vector<double> best_theta, double best_cost)
      : Error(ErrorKind::optimizer, what),
        best_theta_(std::move(best_theta)),
        best_cost_(best_cost) {}
  const std::vector<double>& best_theta() const noexcept { return best_theta_; }
  double best_cost() const noexcept { return best_cost_; }

 private:
  std::vector<double> best_theta_;
  double best_cost_;
};

}  // namespace fdsim
