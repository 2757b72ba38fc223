#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mginf {

// Argument outside the mathematical domain of an operation (negative time,
// non-integrable exponent, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Service law whose mean is infinite; rho and every tail integral diverge.
class InfiniteMeanError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Operation applied to a service law outside its tail regime.
class RegimeError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Invalid parameters, malformed specs, mismatched grids.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// The busy-period series cannot meet the requested tolerance.
class SeriesTruncationError : public std::runtime_error {
  public:
    SeriesTruncationError(const std::string& what, std::size_t required_terms)
        : std::runtime_error(what), required_terms_(required_terms) {}

    std::size_t required_terms() const noexcept { return required_terms_; }

  private:
    std::size_t required_terms_;
};

class RunawayCycleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace mginf
