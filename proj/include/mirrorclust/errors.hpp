#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorclust {

/// Input matrices or sequences have incompatible shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative numeric routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CMDS found a non-positive eigenvalue among the retained ones. Carries the
/// full spectrum of the doubly centered matrix so callers can pick a smaller r.
class DegenerateSpectrumError : public NumericError {
 public:
  DegenerateSpectrumError(const std::string& what, std::vector<double> spectrum)
      : NumericError(what), spectrum_(std::move(spectrum)) {}

  const std::vector<double>& spectrum() const noexcept { return spectrum_; }

 private:
  std::vector<double> spectrum_;
};

/// A file could not be read or parsed. The message names the file and line.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mirrorclust
