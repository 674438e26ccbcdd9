#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracks {

/// A parameter outside the domain of an operator (negative order, bad grid size, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sample vector contained NaN or Inf where finite data was required.
class NonFiniteError : public std::domain_error {
 public:
  explicit NonFiniteError(std::size_t index)
      : std::domain_error("non-finite sample at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A spectrum that does not represent a real field.
class SymmetryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A field with negative samples beyond round-off passed to a functional that needs u >= 0.
class NegativityError : public std::domain_error {
 public:
  NegativityError(std::size_t index, double value)
      : std::domain_error("negative sample " + std::to_string(value) + " at index " +
                          std::to_string(index)),
        index_(index),
        value_(value) {}
  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

}  // namespace fracks
