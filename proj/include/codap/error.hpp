#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace codap {

/// A precondition on an argument was violated.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input carries nothing to work with (e.g. an all-zero signal).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scan series shows no usable modulation (estimated mu1 <= mu0).
class FlatSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap. Carries the best iterate.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> best)
      : std::runtime_error(what), best_iterate_(std::move(best)) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }

 private:
  std::vector<double> best_iterate_;
};

}  // namespace codap
