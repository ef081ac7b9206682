#pragma once

#include <Eigen/Dense>

#include "spshift/quadrature.hpp"

namespace spshift {

/// Nodal Lagrange basis of P_q on the reference cell [0,1] at Gauss-Lobatto points.
///
/// Internally each basis function is kept as monomial coefficients in (t - 1/2), which
/// makes derivatives of any order a Horner evaluation. For the degrees used here
/// (q <= 7) the centred Vandermonde matrix is comfortably conditioned.
template <class Scalar = double>
class LagrangeBasis {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit LagrangeBasis(int q) : q_(q), nodes_(gauss_lobatto_nodes<Scalar>(q)) {
    Matrix vandermonde(q + 1, q + 1);
    for (int i = 0; i <= q; ++i) {
      Scalar s = nodes_(i) - Scalar(0.5), p = 1;
      for (int k = 0; k <= q; ++k, p *= s) vandermonde(i, k) = p;
    }
    monomial_ = vandermonde.fullPivLu().inverse();
  }

  int degree() const { return q_; }
  int size() const { return q_ + 1; }
  const Vector& nodes() const { return nodes_; }

  /// Values (deriv = 0) or derivatives of order `deriv` of all basis functions at t.
  Vector eval(Scalar t, int deriv = 0) const {
    Vector out = Vector::Zero(q_ + 1);
    if (deriv > q_) return out;
    const Scalar s = t - Scalar(0.5);
    for (int j = 0; j <= q_; ++j) {
      Scalar acc = 0;
      for (int k = q_; k >= deriv; --k) acc = acc * s + monomial_(k, j) * falling(k, deriv);
      out(j) = acc;
    }
    return out;
  }

  /// Table with one row per point: rows are eval(points(i), deriv)^T.
  Matrix tabulate(const Vector& points, int deriv = 0) const {
    Matrix table(points.size(), q_ + 1);
    for (Eigen::Index i = 0; i < points.size(); ++i) table.row(i) = eval(points(i), deriv).transpose();
    return table;
  }

 private:
  static Scalar falling(int k, int r) {
    Scalar f = 1;
    for (int i = 0; i < r; ++i) f *= Scalar(k - i);
    return f;
  }

  int q_;
  Vector nodes_;
  Matrix monomial_;  // column j: coefficients of basis j in powers of (t - 1/2)
};

/// Legendre polynomials shifted to [0,1], P_0..P_n evaluated at t.
template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shifted_legendre(int n, Scalar t) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p(n + 1);
  if (n < 0) return p;
  const Scalar x = 2 * t - 1;
  p(0) = 1;
  if (n >= 1) p(1) = x;
  for (int k = 2; k <= n; ++k) p(k) = ((2 * k - 1) * x * p(k - 1) - (k - 1) * p(k - 2)) / k;
  return p;
}

}  // namespace spshift
