// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcnc {

// Invalid sizes, dimensions or parameter values.
class SizingError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at simulation time (singular channel, deep fade).
// The CLI maps this family to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SingularChannelError : public NumericalError {
  public:
    explicit SingularChannelError(std::size_t subcarrier)
        : NumericalError("singular channel: all-zero channel column at data subcarrier " + std::to_string(subcarrier)),
          subcarrier_(subcarrier) {}
    std::size_t subcarrier() const noexcept { return subcarrier_; }

  private:
    std::size_t subcarrier_;
};

class DeepFadeError : public NumericalError {
  public:
    explicit DeepFadeError(std::size_t subcarrier)
        : NumericalError("deep fade: equalizer denominator vanishes at data subcarrier " + std::to_string(subcarrier)),
          subcarrier_(subcarrier) {}
    std::size_t subcarrier() const noexcept { return subcarrier_; }

  private:
    std::size_t subcarrier_;
};

} // namespace mcnc
