#pragma once

#include <functional>
#include <optional>
#include <string>

namespace spshift {

using ScalarFunction = std::function<double(double)>;

/// Constant coefficient values, present when every coefficient is a constant.
struct ConstantCoefficients {
  double b, c, d, f;
};

/// The continuous problem
///   eps^2 u'''' - b u'' + c u + d u(x-1) = f on (0,2),  u = phi on (-1,0),
///   u(0) = u(2) = 0,  u^(m)(0) = u^(m)(2) = 0,
/// together with the coercivity constants beta (b >= beta^2) and delta.
///
/// Immutable after construction; all members are pure callables.
struct ProblemSpec {
  std::string name;
  double epsilon = 1e-4;
  int m = 1;
  ScalarFunction b, c, d, f;
  ScalarFunction phi;                 // history on [-1,0]
  std::optional<ScalarFunction> db;   // b', central differences when absent
  std::optional<ConstantCoefficients> constants;
  double beta = 0.0;
  double delta = 0.0;

  /// b'(x), analytic when supplied.
  double b_prime(double x) const;
  /// phi(x) for x in [-1,0]; throws ValidationError outside.
  double history(double x) const;
};

struct DerivedConstants {
  double beta;
  double delta;
};

/// Number of uniform sample points used to approximate the L-infinity bounds.
inline constexpr int kConstantSamples = 10001;

/// beta = sqrt(min b), delta = min(c - |d|_{inf,(1,2)}/2 - |b'|_inf^2 / (2 beta^2)),
/// both over a uniform grid of kConstantSamples points. Uses the infimum of c.
DerivedConstants derive_constants(const ProblemSpec& spec, int samples = kConstantSamples);

/// Fills beta and delta from derive_constants.
ProblemSpec with_derived_constants(ProblemSpec spec);

/// Checks the sampled invariants (b >= beta^2, coercivity margin >= delta, phi(0) = phi^(m)(0) = 0).
void validate(const ProblemSpec& spec);

/// eps^2 u'''' - u'' + 2u + u(x-1) = 5, u = u' = 0 at both ends, phi = 0.
ProblemSpec make_example1(double epsilon);
/// Same equation as example 1 with u = u'' = 0 at both ends (m = 2).
ProblemSpec make_example2(double epsilon);
/// Constant-coefficient problem (b, c, d, f) with zero history.
ProblemSpec make_constant_problem(std::string name, double epsilon, int m, ConstantCoefficients k);

/// "ex1" / "ex2"; m_override replaces the boundary-condition order when given.
ProblemSpec make_named_problem(const std::string& name, double epsilon,
                               std::optional<int> m_override = std::nullopt);

}  // namespace spshift
