#include "spshift/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spshift/exceptions.hpp"

namespace spshift {

namespace {

constexpr double kDiffStep = 1e-5;

// Second-order differences; one-sided within a step of the domain ends.
double finite_difference(const ScalarFunction& g, double x) {
  const double h = kDiffStep;
  if (x - h < 0.0) return (-3.0 * g(x) + 4.0 * g(x + h) - g(x + 2 * h)) / (2 * h);
  if (x + h > 2.0) return (3.0 * g(x) - 4.0 * g(x - h) + g(x - 2 * h)) / (2 * h);
  return (g(x + h) - g(x - h)) / (2 * h);
}

ScalarFunction constant(double v) {
  return [v](double) { return v; };
}

}  // namespace

double ProblemSpec::b_prime(double x) const {
  if (db) return (*db)(x);
  if (constants) return 0.0;
  return finite_difference(b, x);
}

double ProblemSpec::history(double x) const {
  if (x < -1.0 || x > 0.0) throw ValidationError("history evaluated outside [-1,0]: x = " + std::to_string(x));
  return phi(x);
}

DerivedConstants derive_constants(const ProblemSpec& spec, int samples) {
  if (samples < 2) throw ValidationError("derive_constants: need at least two samples");
  double bmin = std::numeric_limits<double>::infinity();
  double cmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0, dbmax = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = 2.0 * i / (samples - 1);
    bmin = std::min(bmin, spec.b(x));
    cmin = std::min(cmin, spec.c(x));
    dbmax = std::max(dbmax, std::abs(spec.b_prime(x)));
    if (x >= 1.0) dmax = std::max(dmax, std::abs(spec.d(x)));
  }
  if (!(bmin > 0.0)) throw ValidationError("derive_constants: b must be bounded below by a positive constant");
  const double beta = std::sqrt(bmin);
  const double delta = cmin - dmax / 2.0 - dbmax * dbmax / (2.0 * bmin);
  if (!(delta > 0.0)) throw ValidationError("derive_constants: coercivity constant delta <= 0");
  return {beta, delta};
}

ProblemSpec with_derived_constants(ProblemSpec spec) {
  const auto k = derive_constants(spec);
  spec.beta = k.beta;
  spec.delta = k.delta;
  return spec;
}

void validate(const ProblemSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (spec.m != 1 && spec.m != 2) throw ValidationError("m must be 1 or 2");
  if (!spec.b || !spec.c || !spec.d || !spec.f || !spec.phi) throw ValidationError("coefficient callable missing");
  if (!(spec.beta > 0.0) || !(spec.delta > 0.0)) throw ValidationError("beta and delta must be positive");
  const auto k = derive_constants(spec);
  const double tol = 1e-12 * std::max(1.0, k.beta * k.beta);
  if (k.beta * k.beta < spec.beta * spec.beta - tol) throw ValidationError("b >= beta^2 violated");
  if (k.delta < spec.delta - 1e-12 * std::max(1.0, k.delta)) throw ValidationError("coercivity margin below delta");
  // compatibility of the history at 0
  const double h = 1e-4;
  const double p0 = spec.phi(0.0);
  if (std::abs(p0) > 1e-12) throw ValidationError("history must vanish at 0");
  const double p1 = spec.phi(-h), p2 = spec.phi(-2 * h);
  const double deriv = spec.m == 1 ? (3 * p0 - 4 * p1 + p2) / (2 * h) : (p0 - 2 * p1 + p2) / (h * h);
  const double scale = std::max(1.0, std::abs(spec.phi(-1.0)));
  if (std::abs(deriv) > 1e-6 * scale) throw ValidationError("history derivative of order m must vanish at 0");
}

ProblemSpec make_constant_problem(std::string name, double epsilon, int m, ConstantCoefficients k) {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.epsilon = epsilon;
  spec.m = m;
  spec.b = constant(k.b);
  spec.c = constant(k.c);
  spec.d = constant(k.d);
  spec.f = constant(k.f);
  spec.phi = constant(0.0);
  spec.db = constant(0.0);
  spec.constants = k;
  return with_derived_constants(std::move(spec));
}

ProblemSpec make_example1(double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  return make_constant_problem("ex1", epsilon, 1, {1.0, 2.0, 1.0, 5.0});
}

ProblemSpec make_example2(double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  return make_constant_problem("ex2", epsilon, 2, {1.0, 2.0, 1.0, 5.0});
}

ProblemSpec make_named_problem(const std::string& name, double epsilon, std::optional<int> m_override) {
  ProblemSpec spec;
  if (name == "ex1")
    spec = make_example1(epsilon);
  else if (name == "ex2")
    spec = make_example2(epsilon);
  else
    throw ValidationError("unknown example '" + name + "' (expected ex1 or ex2)");
  if (m_override) {
    if (*m_override != 1 && *m_override != 2) throw ValidationError("m override must be 1 or 2");
    spec.m = *m_override;
  }
  return spec;
}

}  // namespace spshift
