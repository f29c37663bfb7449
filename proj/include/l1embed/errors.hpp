#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace l1embed {

// Vector or matrix dimensions that do not agree with the declared BlockShape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside the domain of an operation (zero vector, eps outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The budgeted bit string ran out. Reports how many bits the failing step needed
// and how many were left.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(std::string stage, std::uint64_t needed, std::uint64_t available)
      : std::runtime_error("randomness budget exhausted in " + stage + ": needed " +
                           std::to_string(needed) + " bits, " +
                           std::to_string(available) + " available"),
        stage_(std::move(stage)),
        needed_(needed),
        available_(available) {}

  const std::string& stage() const noexcept { return stage_; }
  std::uint64_t needed() const noexcept { return needed_; }
  std::uint64_t available() const noexcept { return available_; }

 private:
  std::string stage_;
  std::uint64_t needed_;
  std::uint64_t available_;
};

// Gram-Schmidt met a (numerically) dependent column.
class DegenerateRandomness : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dense result would exceed the configured element cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Estimator asked for a subspace dimension it cannot handle (grid oracle, m > 3).
class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace l1embed
