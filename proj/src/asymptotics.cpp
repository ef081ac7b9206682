#include "spshift/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "spshift/errors.hpp"
#include "spshift/exceptions.hpp"
#include "spshift/mesh.hpp"

namespace spshift {

double LayerComponent::scaled(double t, int n) const {
  const double mk = -k;
  const double pn = std::pow(mk, n);
  const double pn1 = n > 0 ? std::pow(mk, n - 1) : 0.0;
  return std::exp(-k * t) * (pn * (alpha + gamma * t) + n * pn1 * gamma);
}

double LayerComponent::operator()(double x, int n) const {
  if (kind == Kind::S0) return (*field)(std::clamp(x, 0.0, 2.0), n);
  const double chain = std::pow(direction / epsilon, n);
  return std::pow(epsilon, power) * chain * scaled(stretched(x), n);
}

LayerComponent solve_reduced(const ProblemSpec& spec, const ReducedOptions& options) {
  ProblemSpec reduced = spec;
  reduced.epsilon = 0.0;
  reduced.m = 1;
  // with eps = 0 the w-block is a plain mass matrix with zero load, so w_h = 0
  const PairField p = solve_problem(reduced, build_uniform(options.cells), options.degree);
  LayerComponent s;
  s.kind = LayerComponent::Kind::S0;
  s.epsilon = spec.epsilon;
  s.field = p.u_field();
  return s;
}

Eigen::VectorXd fd_weights(double z, const std::vector<double>& x, int order) {
  const int n = static_cast<int>(x.size()) - 1;
  if (order > n) throw ValidationError("fd_weights: not enough points for the derivative order");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, order + 1);
  double c1 = 1.0, c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(order);
}

namespace {

// k-th derivative at x0 from k+4 samples on one side (dir = +1 right, -1 left).
double one_sided(const PiecewisePolynomial& s, double x0, int dir, int k, double h) {
  std::vector<double> pts;
  Eigen::VectorXd vals(k + 4);
  for (int j = 0; j < k + 4; ++j) {
    pts.push_back(x0 + dir * j * h);
    vals(j) = s(pts.back());
  }
  return fd_weights(x0, pts, k).dot(vals);
}

void require_constant(const ProblemSpec& spec) {
  if (!spec.constants) throw ValidationError("the decomposition needs constant coefficients");
}

}  // namespace

ReducedData reduced_data(const LayerComponent& s0, double h) {
  if (!s0.field) throw ValidationError("reduced_data: component has no discrete field");
  const auto& f = *s0.field;
  ReducedData d;
  d.d1_left = one_sided(f, 0.0, 1, 1, h);
  d.d1_right = one_sided(f, 2.0, -1, 1, h);
  d.d2_left = one_sided(f, 0.0, 1, 2, h);
  d.d2_right = one_sided(f, 2.0, -1, 2, h);
  d.jump3 = one_sided(f, 1.0, 1, 3, h) - one_sided(f, 1.0, -1, 3, h);
  return d;
}

LayerComponent boundary_layer_leading(const ProblemSpec& spec, const ReducedData& s0, Side side) {
  require_constant(spec);
  const double b = spec.constants->b, k = std::sqrt(b);
  LayerComponent e;
  e.epsilon = spec.epsilon;
  e.k = k;
  e.power = spec.m;
  if (side == Side::left) {
    e.kind = LayerComponent::Kind::E_left;
    e.anchor = 0.0;
    e.direction = 1;
    e.alpha = spec.m == 1 ? s0.d1_left / k : -s0.d2_left / b;
  } else {
    e.kind = LayerComponent::Kind::E_right;
    e.anchor = 2.0;
    e.direction = -1;
    e.alpha = spec.m == 1 ? -s0.d1_right / k : -s0.d2_right / b;
  }
  return e;
}

InnerLayerPair inner_layer_leading(const ProblemSpec& spec, const LayerComponent& e_left,
                                   const LayerComponent& e_right, const ReducedData& s0) {
  require_constant(spec);
  const double b = spec.constants->b, d = spec.constants->d, k = std::sqrt(b);
  // resonant forcing -d A exp(-k t) gives the particular part gamma t exp(-k t), gamma = d A/(2k^3);
  // only first-order boundary terms reach this order, so for m = 2 there is no forcing
  const double a_left = spec.m == 1 ? e_left.alpha : 0.0;
  const double a_right = spec.m == 1 ? e_right.alpha : 0.0;
  const double g_left = d * a_right / (2 * k * k * k);
  const double g_right = d * a_left / (2 * k * k * k);
  // W~_L''(0) = W~_R''(0):                alpha_L k^2 - 2k g_L = alpha_R k^2 - 2k g_R
  // W~_L'''(0) + W~_R'''(0) = -[S0'''](1): -(alpha_L + alpha_R) k^3 + 3k^2 (g_L + g_R) = -J
  Eigen::Matrix2d A;
  A << k * k, -k * k, -k * k * k, -k * k * k;
  Eigen::Vector2d r(2 * k * (g_left - g_right), -s0.jump3 - 3 * k * k * (g_left + g_right));
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(A);
  if (!lu.isInvertible()) throw SolverError("inner layer matching system is singular");
  const Eigen::Vector2d al = lu.solve(r);

  InnerLayerPair w;
  for (auto* c : {&w.left, &w.right}) {
    c->epsilon = spec.epsilon;
    c->k = k;
    c->power = 3;
    c->anchor = 1.0;
  }
  w.left.kind = LayerComponent::Kind::W3_left;
  w.left.direction = -1;
  w.left.alpha = al(0);
  w.left.gamma = g_left;
  w.right.kind = LayerComponent::Kind::W3_right;
  w.right.direction = 1;
  w.right.alpha = al(1);
  w.right.gamma = g_right;
  return w;
}

double Decomposition::boundary_layers(double x, int n) const { return e_left(x, n) + e_right(x, n); }

double Decomposition::inner_layers(double x, int n) const { return x <= 1.0 ? w_left(x, n) : w_right(x, n); }

double Decomposition::v0(double x, int n) const { return s0(x, n) + boundary_layers(x, n) + inner_layers(x, n); }

Decomposition build_decomposition(const ProblemSpec& spec, const ReducedOptions& options) {
  require_constant(spec);
  Decomposition dec;
  dec.s0 = solve_reduced(spec, options);
  dec.data = reduced_data(dec.s0);
  dec.e_left = boundary_layer_leading(spec, dec.data, Side::left);
  dec.e_right = boundary_layer_leading(spec, dec.data, Side::right);
  auto w = inner_layer_leading(spec, dec.e_left, dec.e_right, dec.data);
  dec.w_left = w.left;
  dec.w_right = w.right;
  return dec;
}

std::vector<double> layer_breakpoints(double epsilon) {
  std::vector<double> bp{0.0, 1.0, 2.0};
  for (double a : {0.0, 1.0, 2.0})
    for (double s = epsilon / 8; s < 1.0; s *= 2) {
      if (a - s > 0.0) bp.push_back(a - s);
      if (a + s < 2.0) bp.push_back(a + s);
    }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

DecompositionReport decomposition_compare(const ProblemSpec& spec, const PairField& solution,
                                          const Decomposition& components, int samples) {
  std::vector<double> xs = layer_breakpoints(spec.epsilon);
  for (int i = 0; i < samples; ++i) xs.push_back(2.0 * i / (samples - 1));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const auto uf = solution.u_field();
  const auto wf = solution.w_field();
  DecompositionReport rep;
  rep.samples = static_cast<int>(xs.size());
  for (double x : xs) rep.max_difference = std::max(rep.max_difference, std::abs(uf(x) - components.v0(x)));

  // w' = eps u''' is O(eps) both in S0 and in the inner layer; u'''' = w''/eps is not
  const auto& nodes = wf.nodes();
  double best = -1.0;
  for (int i = 0; i < wf.cells(); ++i) {
    const double a = nodes(i), b = nodes(i + 1), mid = 0.5 * (a + b);
    if (a < 0.25 || b > 1.75) continue;
    double curv = 0.0;
    if (wf.degree() >= 2) {
      curv = std::abs(wf.eval_in_cell(i, mid, 2));
    } else if (i > 0) {
      // jump of the piecewise constant derivative over the mean width
      const double hl = a - nodes(i - 1);
      curv = std::abs(wf.eval_in_cell(i, mid, 1) - wf.eval_in_cell(i - 1, a - hl / 2, 1)) / (0.5 * (hl + b - a));
    }
    if (curv > best) {
      best = curv;
      rep.inner_layer_location = wf.degree() >= 2 ? mid : a;
    }
  }
  return rep;
}

double layer_pair_norm(const ProblemSpec& spec, const LayerComponent& c) {
  // inner terms live on their own side of 1 and are zero on the other
  auto inside = [&](double x) {
    if (c.kind == LayerComponent::Kind::W3_left) return x <= 1.0;
    if (c.kind == LayerComponent::Kind::W3_right) return x >= 1.0;
    return true;
  };
  const auto bp = layer_breakpoints(c.epsilon);
  return norms_of([&](double x, int n) { return inside(x) ? c(x, n) : 0.0; },
                  [&](double x) { return inside(x) ? c.epsilon * c(x, 2) : 0.0; }, spec.beta, spec.delta, bp)
      .energy;
}

}  // namespace spshift
