#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spshift/basis.hpp"
#include "spshift/field.hpp"
#include "spshift/mesh.hpp"
#include "spshift/problem.hpp"
#include "spshift/quadrature.hpp"

namespace spshift {

/// Mesh x degree q x boundary pattern m, with global numbering of the (u,w) unknowns.
///
/// Each component has q*N+1 nodal coefficients (cell i owns i*q .. i*q+q). The u endpoint
/// coefficients are always eliminated; the w endpoints only for m = 2.
class DiscreteSpace {
 public:
  DiscreteSpace(Mesh1D mesh, int q, int m);

  const Mesh1D& mesh() const { return mesh_; }
  int q() const { return q_; }
  int m() const { return m_; }
  int cells() const { return mesh_.cells(); }
  int component_size() const { return q_ * cells() + 1; }
  int u_unknowns() const { return u_count_; }
  int w_unknowns() const { return w_count_; }
  int unknowns() const { return u_count_ + w_count_; }

  /// Global unknown of a component coefficient, -1 when eliminated.
  int u_index(int k) const { return u_map_[k]; }
  int w_index(int k) const { return w_map_[k]; }
  bool u_eliminated(int k) const { return u_map_[k] < 0; }
  bool w_eliminated(int k) const { return w_map_[k] < 0; }

  const LagrangeBasis<double>& basis() const { return *basis_; }
  const std::shared_ptr<const LagrangeBasis<double>>& basis_ptr() const { return basis_; }
  const std::shared_ptr<const Eigen::VectorXd>& node_ptr() const { return nodes_; }

 private:
  Mesh1D mesh_;
  int q_, m_;
  std::shared_ptr<const Eigen::VectorXd> nodes_;
  std::shared_ptr<const LagrangeBasis<double>> basis_;
  std::vector<int> u_map_, w_map_;
  int u_count_ = 0, w_count_ = 0;
};

using SpacePtr = std::shared_ptr<const DiscreteSpace>;

SpacePtr make_space(Mesh1D mesh, int q, int m);

/// Nodal coefficient vectors of (u_h, w_h), full component length; eliminated entries are zero.
struct PairField {
  SpacePtr space;
  Eigen::VectorXd u, w;

  PiecewisePolynomial u_field() const;
  PiecewisePolynomial w_field() const;
  /// Packs the free coefficients into a global unknown vector.
  Eigen::VectorXd unknowns() const;
};

PairField zero_pair(const SpacePtr& space);
PairField pair_from_unknowns(const SpacePtr& space, const Eigen::VectorXd& x);

struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  SpacePtr space;
};

struct AssemblyOptions {
  bool include_shift = true;
  int quadrature_order = 0;  // 0: q + 3
};

/// Nodal Gauss-Lobatto Lagrange basis of P_q on [0,1].
LagrangeBasis<double> reference_basis(int q);

/// Gauss-Legendre rule on [0,1] exact up to degree 2*order-1.
Quadrature quadrature(int order);

/// Matrix of B and vector of F restricted to the free unknowns.
///
/// The shift term <d u(.-1), y> on (1,2) is integrated on the cells of (1,2) split at every
/// image 1 + x_j of a left-half node, so each piece sees a single polynomial on both sides.
AssembledSystem assemble(const ProblemSpec& spec, const SpacePtr& space, const AssemblyOptions& options = {});

struct SolveInfo {
  double residual = 0.0;  // ||Ax-b||_inf
  double scale = 0.0;     // ||A||_inf ||x||_inf + ||b||_inf
};

/// Sparse LU solve; throws SolverError on failure or if the residual exceeds 1e-10 * scale.
PairField solve(const AssembledSystem& system, SolveInfo* info = nullptr);

/// assemble + solve on a fresh space.
PairField solve_problem(const ProblemSpec& spec, const Mesh1D& mesh, int q, SolveInfo* info = nullptr);

/// B(a, b) by the assembly quadrature.
double bilinear_eval(const ProblemSpec& spec, const PairField& a, const PairField& b,
                     const AssemblyOptions& options = {});
/// F(y) for the u-component of the test pair.
double load_eval(const ProblemSpec& spec, const PairField& test, const AssemblyOptions& options = {});

struct PairValue {
  double u, w;
};

/// u and w (deriv = 0) or u' and w' (deriv = 1) at x in [0,2], left cell at nodes.
PairValue eval_field(const PairField& pair, double x, int deriv = 0);

}  // namespace spshift
