#include "spshift/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>

#include "spshift/exceptions.hpp"

namespace spshift {

DiscreteSpace::DiscreteSpace(Mesh1D mesh, int q, int m)
    : mesh_(std::move(mesh)),
      q_(q),
      m_(m),
      nodes_(std::make_shared<const Eigen::VectorXd>(mesh_.nodes)),
      basis_(std::make_shared<const LagrangeBasis<double>>(q)) {
  if (q < 1) throw ValidationError("polynomial degree q must be >= 1");
  if (m != 1 && m != 2) throw ValidationError("boundary pattern m must be 1 or 2");
  if (mesh_.cells() < 1) throw ValidationError("mesh has no cells");
  const int n = component_size();
  u_map_.assign(n, -1);
  w_map_.assign(n, -1);
  for (int k = 1; k < n - 1; ++k) u_map_[k] = u_count_++;
  for (int k = 0; k < n; ++k) {
    if (m == 2 && (k == 0 || k == n - 1)) continue;
    w_map_[k] = w_count_++;
  }
}

SpacePtr make_space(Mesh1D mesh, int q, int m) { return std::make_shared<const DiscreteSpace>(std::move(mesh), q, m); }

PiecewisePolynomial PairField::u_field() const { return {space->node_ptr(), space->basis_ptr(), u}; }
PiecewisePolynomial PairField::w_field() const { return {space->node_ptr(), space->basis_ptr(), w}; }

Eigen::VectorXd PairField::unknowns() const {
  Eigen::VectorXd x(space->unknowns());
  const int n = space->component_size();
  for (int k = 0; k < n; ++k) {
    if (!space->u_eliminated(k)) x(space->u_index(k)) = u(k);
    if (!space->w_eliminated(k)) x(space->u_unknowns() + space->w_index(k)) = w(k);
  }
  return x;
}

PairField zero_pair(const SpacePtr& space) {
  const int n = space->component_size();
  return {space, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

PairField pair_from_unknowns(const SpacePtr& space, const Eigen::VectorXd& x) {
  if (x.size() != space->unknowns()) throw ValidationError("unknown vector length does not match the space");
  PairField p = zero_pair(space);
  const int n = space->component_size();
  for (int k = 0; k < n; ++k) {
    if (!space->u_eliminated(k)) p.u(k) = x(space->u_index(k));
    if (!space->w_eliminated(k)) p.w(k) = x(space->u_unknowns() + space->w_index(k));
  }
  return p;
}

LagrangeBasis<double> reference_basis(int q) {
  if (q < 1) throw ValidationError("reference_basis: q must be >= 1");
  return LagrangeBasis<double>(q);
}

Quadrature quadrature(int order) {
  if (order < 1) throw ValidationError("quadrature: order must be >= 1");
  return gauss_legendre<double>(order);
}

namespace {

// B and F on all 2(qN+1) component coefficients: u block first, then w.
struct FullSystem {
  Eigen::SparseMatrix<double> matrix;  // rows: test (y then z), cols: trial (u then w)
  Eigen::VectorXd rhs;
};

FullSystem assemble_full(const ProblemSpec& spec, const DiscreteSpace& space, const AssemblyOptions& opt) {
  if (spec.m != space.m()) throw ValidationError("problem m does not match the discrete space");
  const int q = space.q(), N = space.cells(), n = space.component_size();
  const auto& x = space.mesh().nodes;
  const auto rule = quadrature(opt.quadrature_order > 0 ? opt.quadrature_order : q + 3);
  const auto& basis = space.basis();
  const Eigen::MatrixXd V = basis.tabulate(rule.points, 0);
  const Eigen::MatrixXd D = basis.tabulate(rule.points, 1);
  const int nq = static_cast<int>(rule.points.size());
  const double eps = spec.epsilon;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(N) * 4 * (q + 1) * (q + 1) * 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);

  for (int i = 0; i < N; ++i) {
    const double h = x(i + 1) - x(i);
    Eigen::MatrixXd kuu = Eigen::MatrixXd::Zero(q + 1, q + 1);
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(q + 1, q + 1);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(q + 1, q + 1);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(q + 1);
    for (int g = 0; g < nq; ++g) {
      const double xg = x(i) + h * rule.points(g);
      const double wg = rule.weights(g) * h;
      const Eigen::VectorXd v = V.row(g).transpose();
      const Eigen::VectorXd dv = D.row(g).transpose() / h;
      const double bg = spec.b(xg), dbg = spec.b_prime(xg), cg = spec.c(xg);
      kuu.noalias() += wg * (bg * dv * dv.transpose() + dbg * v * dv.transpose() + cg * v * v.transpose());
      stiff.noalias() += wg * dv * dv.transpose();
      mass.noalias() += wg * v * v.transpose();
      double fg = spec.f(xg);
      if (x(i + 1) <= 1.0) fg -= spec.d(xg) * spec.history(xg - 1.0);
      load += wg * fg * v;
    }
    for (int a = 0; a <= q; ++a) {
      const int ra = i * q + a;
      rhs(ra) += load(a);
      for (int j = 0; j <= q; ++j) {
        const int cj = i * q + j;
        trip.emplace_back(ra, cj, kuu(a, j));
        trip.emplace_back(ra, n + cj, -eps * stiff(a, j));
        trip.emplace_back(n + ra, cj, eps * stiff(a, j));
        trip.emplace_back(n + ra, n + cj, mass(a, j));
      }
    }
  }

  if (opt.include_shift) {
    const double* begin = x.data();
    const int half = static_cast<int>(std::lower_bound(begin, begin + N + 1, 1.0) - begin);
    if (half > N || x(half) != 1.0) throw ValidationError("mesh has no node at x = 1");
    for (int i = half; i < N; ++i) {
      const double xa = x(i), xb = x(i + 1), h = xb - xa;
      std::vector<double> cuts{xa};
      for (int j = 1; j < half; ++j) {
        const double img = 1.0 + x(j);
        if (img > xa && img < xb && img - xa > 1e-15 && xb - img > 1e-15) cuts.push_back(img);
      }
      cuts.push_back(xb);
      for (size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double pa = cuts[p], pb = cuts[p + 1], hp = pb - pa;
        const double mid = 0.5 * (pa + pb) - 1.0;
        int j = static_cast<int>(std::lower_bound(begin, begin + half + 1, mid) - begin) - 1;
        j = std::clamp(j, 0, half - 1);
        const double hs = x(j + 1) - x(j);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(q + 1, q + 1);
        for (int g = 0; g < nq; ++g) {
          const double xg = pa + hp * rule.points(g);
          const double wg = rule.weights(g) * hp;
          const Eigen::VectorXd vt = basis.eval((xg - xa) / h);
          const Eigen::VectorXd vs = basis.eval((xg - 1.0 - x(j)) / hs);
          loc.noalias() += wg * spec.d(xg) * vt * vs.transpose();
        }
        for (int a = 0; a <= q; ++a)
          for (int b = 0; b <= q; ++b) trip.emplace_back(i * q + a, j * q + b, loc(a, b));
      }
    }
  }

  FullSystem sys;
  sys.matrix.resize(2 * n, 2 * n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.rhs = std::move(rhs);
  return sys;
}

// Columns map free unknowns into the full coefficient vector.
Eigen::SparseMatrix<double> prolongation(const DiscreteSpace& space) {
  const int n = space.component_size();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < n; ++k) {
    if (!space.u_eliminated(k)) t.emplace_back(k, space.u_index(k), 1.0);
    if (!space.w_eliminated(k)) t.emplace_back(n + k, space.u_unknowns() + space.w_index(k), 1.0);
  }
  Eigen::SparseMatrix<double> P(2 * n, space.unknowns());
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

Eigen::VectorXd stacked(const PairField& p) {
  Eigen::VectorXd v(p.u.size() + p.w.size());
  v << p.u, p.w;
  return v;
}

void check_same_space(const PairField& a, const PairField& b) {
  if (!a.space || a.space != b.space) throw ValidationError("pairs live in different discrete spaces");
}

}  // namespace

AssembledSystem assemble(const ProblemSpec& spec, const SpacePtr& space, const AssemblyOptions& options) {
  const FullSystem full = assemble_full(spec, *space, options);
  const Eigen::SparseMatrix<double> P = prolongation(*space);
  AssembledSystem sys;
  sys.matrix = P.transpose() * full.matrix * P;
  // exact zeros (a vanishing shift coefficient) would otherwise change the fill-reducing ordering
  sys.matrix.prune(0.0);
  sys.matrix.makeCompressed();
  sys.rhs = P.transpose() * full.rhs;
  sys.space = space;
  return sys;
}

PairField solve(const AssembledSystem& system, SolveInfo* info) {
  const auto& A = system.matrix;
  if (A.rows() != system.space->unknowns() || A.cols() != A.rows())
    throw ValidationError("system dimension does not match its space");
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(system.rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("sparse LU solve failed");

  double anorm = 0.0;
  {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) rowsum(it.row()) += std::abs(it.value());
    anorm = rowsum.size() ? rowsum.maxCoeff() : 0.0;
  }
  const double bnorm = system.rhs.size() ? system.rhs.lpNorm<Eigen::Infinity>() : 0.0;
  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return system.rhs - A * v; };
  Eigen::VectorXd r = residual(x);
  double scale = anorm * x.lpNorm<Eigen::Infinity>() + bnorm;
  if (r.lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
    x += lu.solve(r);  // one refinement step
    r = residual(x);
    scale = anorm * x.lpNorm<Eigen::Infinity>() + bnorm;
  }
  const double res = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
  if (info) *info = {res, scale};
  if (res > 1e-10 * scale) throw SolverError("linear solve residual " + std::to_string(res) + " exceeds tolerance");
  return pair_from_unknowns(system.space, x);
}

PairField solve_problem(const ProblemSpec& spec, const Mesh1D& mesh, int q, SolveInfo* info) {
  const auto space = make_space(mesh, q, spec.m);
  return solve(assemble(spec, space), info);
}

double bilinear_eval(const ProblemSpec& spec, const PairField& a, const PairField& b, const AssemblyOptions& options) {
  check_same_space(a, b);
  const FullSystem full = assemble_full(spec, *a.space, options);
  return stacked(b).dot(full.matrix * stacked(a));
}

double load_eval(const ProblemSpec& spec, const PairField& test, const AssemblyOptions& options) {
  const FullSystem full = assemble_full(spec, *test.space, options);
  return full.rhs.head(test.u.size()).dot(test.u);
}

PairValue eval_field(const PairField& pair, double x, int deriv) {
  if (x < 0.0 || x > 2.0) throw ValidationError("eval_field: x outside [0,2]");
  if (deriv < 0 || deriv > 1) throw ValidationError("eval_field: derivative order must be 0 or 1");
  const auto uf = pair.u_field();
  const int cell = uf.locate(x);
  const auto wf = pair.w_field();
  return {uf.eval_in_cell(cell, x, deriv), wf.eval_in_cell(cell, x, deriv)};
}

}  // namespace spshift
