#include "spshift/interp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "spshift/exceptions.hpp"
#include "spshift/quadrature.hpp"

namespace spshift {

namespace {

// Pieces of [a,b] cut at the breakpoints strictly inside.
std::vector<double> pieces(double a, double b, const std::vector<double>& bp) {
  std::vector<double> cuts{a};
  const double tol = 1e-14 * std::max(1.0, std::abs(b));
  for (auto it = std::upper_bound(bp.begin(), bp.end(), a); it != bp.end() && *it < b; ++it)
    if (*it - cuts.back() > tol && b - *it > tol) cuts.push_back(*it);
  cuts.push_back(b);
  return cuts;
}

// Composite Gauss over [a,b]; g receives the reference coordinate in the cell [a0, a0+h].
template <class G>
void composite(const std::vector<double>& cuts, const Quadrature& rule, G&& g) {
  for (size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p], len = (cuts[p + 1] - lo) / kMomentPanels;
    for (int s = 0; s < kMomentPanels; ++s)
      for (Eigen::Index k = 0; k < rule.points.size(); ++k)
        g(lo + len * (s + rule.points(k)), rule.weights(k) * len);
  }
}

// Moments of one panel, bisected until the two halves agree with the whole to `tol`
// (absolute, fixed by the top-level panel). Only used for plain callables, which may carry
// layers far thinner than a panel.
template <class G>
Eigen::VectorXd adaptive_panel(G&& g, double lo, double hi, const Quadrature& rule, int depth, double tol = -1.0) {
  auto on = [&](double a, double b, double* mass) {
    Eigen::VectorXd m;
    for (Eigen::Index k = 0; k < rule.points.size(); ++k) {
      const double x = a + (b - a) * rule.points(k), w = rule.weights(k) * (b - a);
      const Eigen::VectorXd v = g(x);
      if (m.size() == 0) m = Eigen::VectorXd::Zero(v.size());
      m += w * v;
      if (mass) *mass += w * v.cwiseAbs().maxCoeff();
    }
    return m;
  };
  double mass = 0.0;
  const double mid = 0.5 * (lo + hi);
  const Eigen::VectorXd whole = on(lo, hi, &mass);
  if (tol < 0.0) tol = 1e-15 * mass;
  const Eigen::VectorXd halves = on(lo, mid, nullptr) + on(mid, hi, nullptr);
  if (depth == 0 || (whole - halves).cwiseAbs().maxCoeff() <= tol) return halves;
  return adaptive_panel(g, lo, mid, rule, depth - 1, tol) + adaptive_panel(g, mid, hi, rule, depth - 1, tol);
}

}  // namespace

PiecewisePolynomial interpolate_on(const ScalarFunction& fn, const Eigen::VectorXd& nodes, int q,
                                   std::span<const double> breakpoints) {
  if (q < 1) throw ValidationError("interpolate: q must be >= 1");
  const int N = static_cast<int>(nodes.size()) - 1;
  if (N < 1) throw ValidationError("interpolate: mesh has no cells");
  auto basis = std::make_shared<const LagrangeBasis<double>>(q);
  std::vector<double> bp(breakpoints.begin(), breakpoints.end());
  std::sort(bp.begin(), bp.end());

  Eigen::VectorXd coeffs(q * N + 1);
  for (int i = 0; i <= N; ++i) coeffs(i * q) = fn(nodes(i));

  if (q >= 2) {
    // M(k, j) = int_0^1 P_k phi_j, exact with q+1 Gauss points
    const auto exact = gauss_legendre<double>(q + 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(q - 1, q + 1);
    for (Eigen::Index g = 0; g < exact.points.size(); ++g) {
      const Eigen::VectorXd P = shifted_legendre<double>(q - 2, exact.points(g));
      M += exact.weights(g) * P * basis->eval(exact.points(g)).transpose();
    }
    const Eigen::MatrixXd interior = M.middleCols(1, q - 1);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(interior);
    const auto rule = gauss_legendre<double>(q + 6);

    for (int i = 0; i < N; ++i) {
      const double a = nodes(i), h = nodes(i + 1) - a;
      Eigen::VectorXd mom = Eigen::VectorXd::Zero(q - 1);
      if (bp.empty()) {
        const double len = h / kMomentPanels;
        auto g = [&](double x) -> Eigen::VectorXd { return fn(x) / h * shifted_legendre<double>(q - 2, (x - a) / h); };
        for (int p = 0; p < kMomentPanels; ++p) mom += adaptive_panel(g, a + p * len, a + (p + 1) * len, rule, 30);
      } else {
        composite(pieces(a, nodes(i + 1), bp), rule, [&](double x, double w) {
          mom += w / h * fn(x) * shifted_legendre<double>(q - 2, (x - a) / h);
        });
      }
      mom -= M.col(0) * coeffs(i * q) + M.col(q) * coeffs(i * q + q);
      coeffs.segment(i * q + 1, q - 1) = lu.solve(mom);
    }
  }
  return {std::make_shared<const Eigen::VectorXd>(nodes), basis, coeffs};
}

Eigen::VectorXd interpolate(const ScalarFunction& fn, const InterpolationTarget& target,
                            std::span<const double> breakpoints) {
  const auto& space = *target.space;
  Eigen::VectorXd c = interpolate_on(fn, space.mesh().nodes, space.q(), breakpoints).coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const bool gone = target.component == Component::u ? space.u_eliminated(k) : space.w_eliminated(k);
    if (gone) c(k) = 0.0;
  }
  return c;
}

PairField interpolate_pair(const ScalarFunction& u, const ScalarFunction& w, const SpacePtr& space,
                           std::span<const double> breakpoints) {
  return {space, interpolate(u, {space, Component::u}, breakpoints), interpolate(w, {space, Component::w}, breakpoints)};
}

PairField interpolate_field(const PairField& source, const SpacePtr& target) {
  const auto uf = source.u_field();
  const auto wf = source.w_field();
  const auto& n = source.space->mesh().nodes;
  const std::span<const double> bp(n.data(), static_cast<size_t>(n.size()));
  return interpolate_pair([&](double x) { return uf(x); }, [&](double x) { return wf(x); }, target, bp);
}

LocalInterpReport local_interp_error_bound_check(const std::function<double(double, int)>& fn,
                                                 const Eigen::VectorXd& nodes, int q, int ell, int s) {
  if (!(0 <= ell && ell < s && s <= q + 1)) throw ValidationError("need 0 <= l < s <= q+1");
  const auto Iv = interpolate_on([&](double x) { return fn(x, 0); }, nodes, q);
  const auto rule = gauss_legendre<double>(q + 6);
  LocalInterpReport rep;
  for (int i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes(i), b = nodes(i + 1), h = b - a;
    double lhs = 0.0, rhs = 0.0;
    composite({a, b}, rule, [&](double x, double w) {
      const double e = fn(x, ell) - Iv.eval_in_cell(i, x, ell);
      const double r = std::pow(h, s - ell) * fn(x, s);
      lhs += w * e * e;
      rhs += w * r * r;
    });
    lhs = std::sqrt(lhs);
    rhs = std::sqrt(rhs);
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.max_lhs = std::max(rep.max_lhs, lhs);
  }
  return rep;
}

PiecewisePolynomial postprocess(const PiecewisePolynomial& field) {
  const int N = field.cells(), q = field.degree();
  if (N % 2 != 0) throw ValidationError("postprocess: number of cells must be even");
  const auto& x = field.nodes();
  for (int i = 0; i < N; i += 2)
    if (x(i) < 1.0 && 1.0 < x(i + 2)) throw ValidationError("postprocess: a macro cell straddles x = 1");

  const int M = N / 2;
  Eigen::VectorXd macro(M + 1);
  for (int i = 0; i <= M; ++i) macro(i) = x(2 * i);
  auto out_basis = std::make_shared<const LagrangeBasis<double>>(q + 1);
  const Eigen::VectorXd& gll = field.basis().nodes();
  const Eigen::VectorXd& out_nodes = out_basis->nodes();
  Eigen::VectorXd coeffs(M * (q + 1) + 1);

  for (int i = 0; i < M; ++i) {
    const double a = x(2 * i), b = x(2 * i + 1), c = x(2 * i + 2), H = c - a;
    const double va = field.coeffs()(2 * i * q), vc = field.coeffs()((2 * i + 2) * q);
    // interior nodal points of both cells, including the shared vertex
    Eigen::VectorXd s(2 * q - 1), v(2 * q - 1);
    int k = 0;
    for (int j = 1; j <= q; ++j, ++k) {
      s(k) = (b - a) * gll(j) / H;
      v(k) = field.coeffs()(2 * i * q + j);
    }
    for (int j = 1; j < q; ++j, ++k) {
      s(k) = ((b - a) + (c - b) * gll(j)) / H;
      v(k) = field.coeffs()((2 * i + 1) * q + j);
    }
    Eigen::MatrixXd A(2 * q - 1, q);
    for (int r = 0; r < 2 * q - 1; ++r) {
      A.row(r) = s(r) * (1 - s(r)) * shifted_legendre<double>(q - 1, s(r)).transpose();
      v(r) -= va * (1 - s(r)) + vc * s(r);
    }
    const Eigen::VectorXd bubble = A.colPivHouseholderQr().solve(v);
    for (int j = 0; j <= q + 1; ++j) {
      const double t = out_nodes(j);
      coeffs(i * (q + 1) + j) = va * (1 - t) + vc * t + t * (1 - t) * shifted_legendre<double>(q - 1, t).dot(bubble);
    }
    coeffs(i * (q + 1)) = va;
    coeffs((i + 1) * (q + 1)) = vc;
  }
  return {std::make_shared<const Eigen::VectorXd>(macro), out_basis, coeffs};
}

PostprocessedPair postprocess(const PairField& pair) { return {postprocess(pair.u_field()), postprocess(pair.w_field())}; }

}  // namespace spshift
