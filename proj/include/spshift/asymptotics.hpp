#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "spshift/fem.hpp"
#include "spshift/field.hpp"
#include "spshift/problem.hpp"

namespace spshift {

/// One term of the leading-order decomposition.
///
/// Closed-form terms have the shape eps^p (alpha + gamma tau) exp(-k tau) with the stretched
/// variable tau = direction (x - anchor) / eps; S0 holds a discrete field instead.
struct LayerComponent {
  enum class Kind { S0, E_left, E_right, W3_left, W3_right };

  Kind kind = Kind::S0;
  double epsilon = 0.0;
  int power = 0;
  double alpha = 0.0, gamma = 0.0, k = 1.0;
  double anchor = 0.0;
  int direction = 1;
  std::optional<PiecewisePolynomial> field;

  /// n-th x-derivative at x.
  double operator()(double x, int n = 0) const;
  /// n-th derivative of the profile (alpha + gamma t) exp(-k t) in the stretched variable.
  double scaled(double t, int n = 0) const;
  double stretched(double x) const { return direction * (x - anchor) / epsilon; }
};

struct ReducedOptions {
  int cells = 1024;
  int degree = 4;
};

/// -b S'' + c S + d S(.-1) chi_(1,2) = f - d Phi(.-1) chi_(0,1), S(0) = S(2) = 0, on a uniform mesh.
LayerComponent solve_reduced(const ProblemSpec& spec, const ReducedOptions& options = {});

/// Derivative data of S0 taken by one-sided order-4 finite differences.
struct ReducedData {
  double d1_left = 0.0, d1_right = 0.0;  // S0'(0), S0'(2)
  double d2_left = 0.0, d2_right = 0.0;  // S0''(0), S0''(2)
  double jump3 = 0.0;                    // S0'''(1+) - S0'''(1-)
};

/// Step of the finite-difference stencils.
inline constexpr double kReducedStep = 1.0 / 64;

/// Weights of the derivative of order `order` at z from values at `points` (Fornberg).
Eigen::VectorXd fd_weights(double z, const std::vector<double>& points, int order);

ReducedData reduced_data(const LayerComponent& s0, double h = kReducedStep);

enum class Side { left, right };

/// m = 1: eps A exp(-sqrt(b) x/eps), A = S0'(0)/sqrt(b) (right: A = -S0'(2)/sqrt(b)).
/// m = 2: eps^2 A exp(...), A = -S0''(0)/b (right: -S0''(2)/b).
LayerComponent boundary_layer_leading(const ProblemSpec& spec, const ReducedData& s0, Side side);

struct InnerLayerPair {
  LayerComponent left, right;
};

/// eps^3 W3 on both sides of x = 1: W~'''' - b W~'' = -d A~ exp(-sqrt(b) t) with the
/// amplitude of the opposite boundary term, W~''(0) equal on both sides and the third
/// derivatives cancelling the jump of S0''' so that V0''' is continuous.
InnerLayerPair inner_layer_leading(const ProblemSpec& spec, const LayerComponent& e_left,
                                   const LayerComponent& e_right, const ReducedData& s0);

struct Decomposition {
  LayerComponent s0, e_left, e_right, w_left, w_right;
  ReducedData data;

  /// V0 = S0 + E_left + E_right + (W_left on [0,1], W_right on (1,2]).
  double v0(double x, int n = 0) const;
  double boundary_layers(double x, int n = 0) const;
  double inner_layers(double x, int n = 0) const;
};

/// Requires constant coefficients.
Decomposition build_decomposition(const ProblemSpec& spec, const ReducedOptions& options = {});

struct DecompositionReport {
  double max_difference = 0.0;  // max |u_h - V0| on the sample grid
  double inner_layer_location = 0.0;  // where |w_h''| peaks inside [0.25, 1.75]
  int samples = 0;
};

/// Compares a discrete solution with V0 on a uniform sample grid of [0,2] refined near the layers.
DecompositionReport decomposition_compare(const ProblemSpec& spec, const PairField& solution,
                                          const Decomposition& components, int samples = 4001);

/// Energy-type norms of the closed-form pairs (E, eps E'') and (W, eps W'') over [0,2];
/// W_left counts on [0,1] only, W_right on [1,2].
double layer_pair_norm(const ProblemSpec& spec, const LayerComponent& c);

/// Sample grid of [0,2] with geometric clustering around 0, 1 and 2 on the scale eps.
std::vector<double> layer_breakpoints(double epsilon);

}  // namespace spshift
