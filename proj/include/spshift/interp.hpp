#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "spshift/fem.hpp"
#include "spshift/field.hpp"
#include "spshift/problem.hpp"

namespace spshift {

enum class Component { u, w };

/// Which half of a DiscreteSpace an interpolant lives in; decides the eliminated endpoints.
struct InterpolationTarget {
  SpacePtr space;
  Component component = Component::u;
};

/// Sub-panels per cell (or per piece between breakpoints) for the moment integrals.
inline constexpr int kMomentPanels = 8;

/// Interpolant on an arbitrary mesh: endpoint values of every cell plus moments against P_{q-2}.
///
/// `breakpoints` are points where fn may have kinks or change polynomial pieces (for example the
/// nodes of a discrete interpoland); moment integrals never straddle them.
/// Without breakpoints each of the kMomentPanels panels is bisected adaptively, so layers much
/// thinner than a cell still get exact moments.
PiecewisePolynomial interpolate_on(const ScalarFunction& fn, const Eigen::VectorXd& nodes, int q,
                                   std::span<const double> breakpoints = {});

/// Component coefficients (full length, eliminated endpoints set to zero).
Eigen::VectorXd interpolate(const ScalarFunction& fn, const InterpolationTarget& target,
                            std::span<const double> breakpoints = {});

/// I = (I_1, I_2) of a pair of callables.
PairField interpolate_pair(const ScalarFunction& u, const ScalarFunction& w, const SpacePtr& space,
                           std::span<const double> breakpoints = {});

/// I applied to a discrete pair that may live on another mesh and degree.
PairField interpolate_field(const PairField& source, const SpacePtr& target);

/// Per-cell comparison of ||(v - Iv)^(l)||_{L2(T)} with ||h^{s-l} v^(s)||_{L2(T)}.
struct LocalInterpReport {
  std::vector<double> ratios;  // per cell, 0 where the right side vanishes
  double max_ratio = 0.0;
  double max_lhs = 0.0;
};

/// fn(x, k) returns the k-th derivative of the interpoland.
LocalInterpReport local_interp_error_bound_check(const std::function<double(double, int)>& fn,
                                                 const Eigen::VectorXd& nodes, int q, int ell, int s);

/// Macro-cell recovery into P_{q+1}.
///
/// Cells (2i, 2i+1) form macro cell i. The recovered polynomial keeps the two macro-vertex
/// values and fits the remaining 2q-1 nodal values of the field in least squares, which is
/// plain interpolation through the three vertices for q = 1. Polynomials of degree q+1 are
/// reproduced exactly.
PiecewisePolynomial postprocess(const PiecewisePolynomial& field);

struct PostprocessedPair {
  PiecewisePolynomial u, w;
};

PostprocessedPair postprocess(const PairField& pair);

}  // namespace spshift
