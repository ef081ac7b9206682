#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spshift {

enum class GreensVariant { m1, m2 };

/// eps^2 G'''' - b G'' + c G = delta(x - t) on (0,1) with G = G_x = 0 (m1) or G = G_xx = 0 (m2) at both ends.
struct GreensParams {
  double b = 1.0;
  double c = 1.0;
  double epsilon = 1e-4;
  GreensVariant variant = GreensVariant::m1;
};

struct CharRoots {
  double mu1;  // ~ sqrt(b)/eps
  double mu2;  // ~ sqrt(c/b)
  double disc; // sqrt(b^2 - 4 eps^2 c)
};

CharRoots char_roots(const GreensParams& p);

/// G(., t) for one source point.
///
/// Stored as the free-space solution K(x - t) = A1 exp(-mu1 |x-t|) + A2 exp(-mu2 |x-t|) plus
/// sum_i h_i y_i(x) over y1 = exp(-mu1 x), y2 = exp(-mu2 x), y3 = exp(-mu1 (1-x)), y4 = exp(-mu2 (1-x)).
/// Splitting off K keeps every coefficient O(1) in double precision; the usual left/right
/// coefficient sets over y1..y4 are K's expansion plus h.
struct GreensKernel {
  GreensParams params;
  CharRoots roots;
  double t = 0.5;
  double a1 = 0.0, a2 = 0.0;      // amplitudes of K
  Eigen::Vector4d h;              // homogeneous correction

  /// k-th x-derivative of G(x, t); at x = t the right-sided limit.
  double operator()(double x, int k = 0) const;
  /// One-sided limit at x = t (side = -1 left, +1 right).
  double at_source(int side, int k) const;
};

GreensKernel kernel_at(const GreensParams& p, double t);

/// Relative residuals of the 4 boundary conditions and the 4 jump conditions at t
/// (the last one measures [G_xxx](t) against eps^-2).
std::array<double, 8> kernel_residuals(const GreensKernel& g);

/// Breakpoints of [0,1] graded geometrically (ratio 2) towards each focus point down to eps/10.
std::vector<double> graded_breakpoints(double epsilon, const std::vector<double>& focus);

/// int_0^1 d_x^deriv G(x0, t) t^k dt.
double moment_integral(const GreensParams& p, double x0, int deriv, int k);

/// int_0^1 d_x^deriv G(0, t) int_0^1 G(t, s) s^k ds dt.
double double_integral(const GreensParams& p, int k, int deriv);

/// int_0^1 G(x, t) dt.
double load_integral(const GreensParams& p, double x);

/// int_0^1 |d_x^deriv G(x0, t)| dt.
double absolute_moment(const GreensParams& p, double x0, int deriv);

enum class HermiteKind { value_derivative, value_second_derivative };

/// Monomial coefficients (constant first) of the four cubic Hermite functions, dual to
/// {v(0), v(1), v'(0), v'(1)} or {v(0), v(1), v''(0), v''(1)}.
std::array<Eigen::Vector4d, 4> hermite_basis(HermiteKind kind);

/// Evaluates a cubic in monomial coefficients, or its derivative.
double eval_cubic(const Eigen::Vector4d& p, double x, int deriv = 0);

struct StabilityMatrix {
  Eigen::Matrix2d A;
  double det = 0.0;
  double inverse_norm = 0.0;  // ||A^-1||_inf
  // F_i''(1), F_i'''(1) for i = 1..4
  std::array<double, 4> f2{}, f3{};
};

/// Scaled 2x2 system for the unknown values at x = 1:
///   [ eps(F3''-F1'')       eps(F4''-F2''-8) ]
///   [ eps^2(F3'''-F1'''+24)  eps^2(F4'''-F2''') ]   all at x = 1.
/// Only defined for the m1 variant.
StabilityMatrix assemble_A(const GreensParams& p, double d);

/// eps -> 0 limits of the scaled moments and G(1/2) load for b = c = 1.
struct LeadingConstants {
  std::array<double, 4> moment_at_1;  // eps int G_xx(1,t) t^k
  std::array<double, 4> moment_at_0;  // eps int G_xx(0,t) t^k
  std::array<double, 4> double_at_0;  // eps int G_xx(0,t) int G(t,s) s^k
  double half_load;                   // int G(1/2,t) dt
};

LeadingConstants leading_constants();

/// Leading-order closed form for det(A), reading its "1-e^(2)" factor as 1 - e^2.
double closed_form_det_leading(double b, double c, double d);
/// Closed-form leading A entries from the same formula (row-major).
Eigen::Matrix2d closed_form_A_leading(double b, double c, double d);

struct StabilityReport {
  std::vector<double> epsilons;
  std::vector<double> half_load;      // int G(1/2,t) dt
  std::vector<double> scaled_abs_xx;  // eps int |G_xx(0,t)| dt
  std::vector<double> scaled_abs_xxx; // eps^2 int |G_xxx(0,t)| dt
  double min_load = 0.0;              // min over sampled x of int G(x,t) dt
  double max_load_excess = 0.0;       // max over sampled x of int G(x,t) - int G(1/2,t)
  bool positive = false;
  bool bounded_by_half = false;
};

StabilityReport stability_bound_check(const std::vector<GreensParams>& params);

/// One verification row: scaled computed value against its leading constant.
struct GreensRow {
  std::string name;
  double epsilon = 0.0;
  double computed = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
  bool has_target = true;
};

/// Every moment, double integral, G(1/2) load and det(A) for each eps (m1), or kernel
/// residual rows only (m2).
std::vector<GreensRow> greens_table(const std::vector<double>& epsilons, GreensVariant variant = GreensVariant::m1,
                                    double b = 1.0, double c = 1.0, double d = 1.0);

}  // namespace spshift
