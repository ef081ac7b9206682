#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace spshift {

template <class Scalar>
struct QuadratureRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> points;   // on [0,1]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;  // sum to 1
};

using Quadrature = QuadratureRule<double>;

/// Legendre polynomial P_n and its derivative at x in [-1,1].
template <class Scalar>
void legendre_with_derivative(int n, Scalar x, Scalar& p, Scalar& dp) {
  Scalar p0 = 1, p1 = x;
  if (n == 0) {
    p = 1;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1);
}

/// n-point Gauss-Legendre rule mapped to [0,1]; exact for degree <= 2n-1.
template <class Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  QuadratureRule<Scalar> rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    Scalar p{}, dp{};
    for (int it = 0; it < 100; ++it) {
      legendre_with_derivative(n, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    legendre_with_derivative(n, x, p, dp);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    // x is the descending root; mirror for the ascending one
    rule.points(i) = (1 - x) / 2;
    rule.points(n - 1 - i) = (1 + x) / 2;
    rule.weights(i) = w / 2;
    rule.weights(n - 1 - i) = w / 2;
  }
  if (n % 2 == 1) rule.points(n / 2) = Scalar(0.5);
  return rule;
}

/// Gauss-Lobatto-Legendre nodes on [0,1] (q+1 nodes including both endpoints).
template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gauss_lobatto_nodes(int q) {
  if (q < 1) throw std::invalid_argument("gauss_lobatto_nodes: degree must be >= 1");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes(q + 1);
  nodes(0) = 0;
  nodes(q) = 1;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  // interior nodes are the roots of P_q'
  for (int i = 1; i < q; ++i) {
    Scalar x = -std::cos(pi * i / q);
    for (int it = 0; it < 100; ++it) {
      Scalar p{}, dp{};
      legendre_with_derivative(q, x, p, dp);
      // P_q'' from the Legendre ODE: (1-x^2) P'' = 2x P' - q(q+1) P
      const Scalar d2p = (2 * x * dp - q * (q + 1) * p) / (1 - x * x);
      const Scalar dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    nodes(i) = (1 + x) / 2;
  }
  return nodes;
}

}  // namespace spshift
