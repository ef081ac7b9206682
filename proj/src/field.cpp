#include "spshift/field.hpp"

#include <algorithm>
#include <cmath>

#include "spshift/exceptions.hpp"

namespace spshift {

PiecewisePolynomial::PiecewisePolynomial(std::shared_ptr<const Eigen::VectorXd> nodes,
                                         std::shared_ptr<const LagrangeBasis<double>> basis, Eigen::VectorXd coeffs)
    : nodes_(std::move(nodes)), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_->degree() * (nodes_->size() - 1) + 1)
    throw ValidationError("PiecewisePolynomial: coefficient length does not match mesh and degree");
}

PiecewisePolynomial::PiecewisePolynomial(const Eigen::VectorXd& nodes, int degree, Eigen::VectorXd coeffs)
    : PiecewisePolynomial(std::make_shared<const Eigen::VectorXd>(nodes),
                          std::make_shared<const LagrangeBasis<double>>(degree), std::move(coeffs)) {}

int PiecewisePolynomial::locate(double x) const {
  const auto& n = *nodes_;
  const int N = cells();
  const double tol = 1e-14 * std::max(1.0, std::abs(n(N)));
  if (x < n(0) - tol || x > n(N) + tol) throw ValidationError("evaluation point outside the mesh");
  const double* begin = n.data();
  const double* it = std::lower_bound(begin, begin + N + 1, x);
  const int i = static_cast<int>(it - begin) - 1;
  return std::clamp(i, 0, N - 1);
}

double PiecewisePolynomial::eval_in_cell(int cell, double x, int deriv) const {
  const auto& n = *nodes_;
  const double h = n(cell + 1) - n(cell);
  const double t = (x - n(cell)) / h;
  const double v = basis_->eval(t, deriv).dot(local(cell));
  return deriv == 0 ? v : v / std::pow(h, deriv);
}

double PiecewisePolynomial::operator()(double x, int deriv) const { return eval_in_cell(locate(x), x, deriv); }

}  // namespace spshift
