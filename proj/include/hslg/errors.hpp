#pragma once

#include <stdexcept>
#include <string>

namespace hslg {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Lattice or grid index outside the stored range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Inputs are individually valid but inconsistent with each other.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A sampler gave up (rejection cap, bracket failure, all weights zero).
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HSLG_REQUIRE(cond, Error, msg)          \
  do {                                          \
    if (!(cond)) throw Error(std::string(msg)); \
  } while (0)

}  // namespace hslg
