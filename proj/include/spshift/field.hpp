#pragma once

#include <memory>

#include <Eigen/Core>

#include "spshift/basis.hpp"

namespace spshift {

/// Continuous piecewise polynomial of degree q on a 1D mesh, stored by its values at the
/// Gauss-Lobatto nodes of every cell (global length q*N+1, neighbouring cells share the vertex).
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() = default;
  PiecewisePolynomial(std::shared_ptr<const Eigen::VectorXd> nodes, std::shared_ptr<const LagrangeBasis<double>> basis,
                      Eigen::VectorXd coeffs);
  PiecewisePolynomial(const Eigen::VectorXd& nodes, int degree, Eigen::VectorXd coeffs);

  /// Value or derivative at x in [x_0, x_N]; nodes use the left cell.
  double operator()(double x, int deriv = 0) const;
  double eval_in_cell(int cell, double x, int deriv = 0) const;
  /// Cell i with x_i < x <= x_{i+1} (cell 0 for x = x_0). Throws outside the mesh.
  int locate(double x) const;

  int degree() const { return basis_->degree(); }
  int cells() const { return static_cast<int>(nodes_->size()) - 1; }
  const Eigen::VectorXd& nodes() const { return *nodes_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const std::shared_ptr<const Eigen::VectorXd>& node_ptr() const { return nodes_; }
  const LagrangeBasis<double>& basis() const { return *basis_; }
  const std::shared_ptr<const LagrangeBasis<double>>& basis_ptr() const { return basis_; }

  /// Local coefficient block of one cell.
  auto local(int cell) const { return coeffs_.segment(cell * degree(), degree() + 1); }

 private:
  std::shared_ptr<const Eigen::VectorXd> nodes_;
  std::shared_ptr<const LagrangeBasis<double>> basis_;
  Eigen::VectorXd coeffs_;
};

}  // namespace spshift
