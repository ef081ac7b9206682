#pragma once

#include <stdexcept>
#include <string>

namespace spshift {

/// Input violates a documented precondition (bad parameters, mismatched spaces, ...).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A linear solve or factorization failed or produced an unacceptable residual.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spshift
