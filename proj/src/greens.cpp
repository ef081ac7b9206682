#include "spshift/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "spshift/exceptions.hpp"
#include "spshift/quadrature.hpp"

namespace spshift {

namespace {

constexpr int kGaussOrder = 10;

void check_params(const GreensParams& p) {
  if (!(p.b > 0.0) || !(p.c >= 0.0) || !(p.epsilon > 0.0)) throw ValidationError("greens: need b > 0, c >= 0, eps > 0");
  if (!(p.b * p.b - 4 * p.epsilon * p.epsilon * p.c > 0.0))
    throw ValidationError("greens: characteristic roots collide (b^2 - 4 eps^2 c <= 0)");
}

int boundary_order(const GreensParams& p) { return p.variant == GreensVariant::m1 ? 1 : 2; }

// y_i^(k)(x)
Eigen::Vector4d char_basis(const CharRoots& r, double x, int k) {
  const double m1 = r.mu1, m2 = r.mu2;
  return {std::pow(-m1, k) * std::exp(-m1 * x), std::pow(-m2, k) * std::exp(-m2 * x),
          std::pow(m1, k) * std::exp(-m1 * (1 - x)), std::pow(m2, k) * std::exp(-m2 * (1 - x))};
}

// k-th derivative of the free-space kernel; side +1 uses the s >= 0 branch
double free_kernel(const GreensKernel& g, double s, int k, int side) {
  const double m1 = g.roots.mu1, m2 = g.roots.mu2;
  if (side > 0) return g.a1 * std::pow(-m1, k) * std::exp(-m1 * s) + g.a2 * std::pow(-m2, k) * std::exp(-m2 * s);
  return g.a1 * std::pow(m1, k) * std::exp(m1 * s) + g.a2 * std::pow(m2, k) * std::exp(m2 * s);
}

const Quadrature& gauss_rule() {
  static const Quadrature rule = gauss_legendre<double>(kGaussOrder);
  return rule;
}

template <class F>
double integrate(const std::vector<double>& bp, F&& f) {
  const auto& rule = gauss_rule();
  double sum = 0.0;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], h = bp[i + 1] - a;
    for (Eigen::Index g = 0; g < rule.points.size(); ++g) sum += rule.weights(g) * h * f(a + h * rule.points(g));
  }
  return sum;
}

// eps int G_xx(0,t) int G(t,s) s^k and the G_xxx analogue for k = 0..3 (rows: deriv 2, 3)
Eigen::Matrix<double, 2, 4> double_integrals_all(const GreensParams& p) {
  const auto outer = graded_breakpoints(p.epsilon / std::max(1.0, std::sqrt(p.b)), {0.0, 1.0});
  Eigen::Matrix<double, 2, 4> out = Eigen::Matrix<double, 2, 4>::Zero();
  const auto& rule = gauss_rule();
  for (size_t i = 0; i + 1 < outer.size(); ++i) {
    const double a = outer[i], h = outer[i + 1] - a;
    for (Eigen::Index g = 0; g < rule.points.size(); ++g) {
      const double t = a + h * rule.points(g), w = rule.weights(g) * h;
      const GreensKernel kt = kernel_at(p, t);
      const double gxx = kt(0.0, 2), gxxx = kt(0.0, 3);
      const auto inner_bp = graded_breakpoints(p.epsilon / std::max(1.0, std::sqrt(p.b)), {0.0, t, 1.0});
      Eigen::Vector4d inner = Eigen::Vector4d::Zero();
      for (size_t j = 0; j + 1 < inner_bp.size(); ++j) {
        const double sa = inner_bp[j], sh = inner_bp[j + 1] - sa;
        for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
          const double s = sa + sh * rule.points(q), ws = rule.weights(q) * sh;
          const double gts = kernel_at(p, s)(t, 0) * ws;
          inner += gts * Eigen::Vector4d(1.0, s, s * s, s * s * s);
        }
      }
      out.row(0) += w * gxx * inner.transpose();
      out.row(1) += w * gxxx * inner.transpose();
    }
  }
  return out;
}

Eigen::Vector4d apply_L(const Eigen::Vector4d& P, double b, double c) {
  // b P'' - c P in monomial coefficients
  Eigen::Vector4d d2(2 * P(2), 6 * P(3), 0.0, 0.0);
  return b * d2 - c * P;
}

}  // namespace

CharRoots char_roots(const GreensParams& p) {
  check_params(p);
  const double e2 = p.epsilon * p.epsilon;
  const double disc = std::sqrt(p.b * p.b - 4 * e2 * p.c);
  // mu2 via the product mu1^2 mu2^2 = c/eps^2 to avoid cancellation
  return {std::sqrt((p.b + disc) / (2 * e2)), std::sqrt(2 * p.c / (p.b + disc)), disc};
}

double GreensKernel::operator()(double x, int k) const {
  const double s = x - t;
  return free_kernel(*this, s, k, s >= 0.0 ? 1 : -1) + h.dot(char_basis(roots, x, k));
}

double GreensKernel::at_source(int side, int k) const {
  return free_kernel(*this, 0.0, k, side) + h.dot(char_basis(roots, t, k));
}

GreensKernel kernel_at(const GreensParams& p, double t) {
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("kernel_at: t must lie in (0,1)");
  GreensKernel g;
  g.params = p;
  g.roots = char_roots(p);
  g.t = t;
  // A1 = -1/(2 mu1 D), A2 = 1/(2 mu2 D): continuous up to K'' and [K'''] = eps^-2
  g.a1 = -1.0 / (2 * g.roots.mu1 * g.roots.disc);
  g.a2 = g.roots.mu2 > 0.0 ? 1.0 / (2 * g.roots.mu2 * g.roots.disc) : 0.0;
  if (g.roots.mu2 == 0.0) throw ValidationError("kernel_at: c = 0 has no decaying second root");

  // fast-root columns are rescaled by mu1^-kb so the derivative rows stay O(1) in every unknown
  const int kb = boundary_order(p);
  const double fast = std::pow(g.roots.mu1, -kb);
  const Eigen::Vector4d cs(fast, 1.0, fast, 1.0);
  Eigen::Matrix4d M;
  Eigen::Vector4d rhs;
  M.row(0) = char_basis(g.roots, 0.0, 0).cwiseProduct(cs).transpose();
  M.row(1) = char_basis(g.roots, 0.0, kb).cwiseProduct(cs).transpose();
  M.row(2) = char_basis(g.roots, 1.0, 0).cwiseProduct(cs).transpose();
  M.row(3) = char_basis(g.roots, 1.0, kb).cwiseProduct(cs).transpose();
  rhs << -free_kernel(g, -t, 0, -1), -free_kernel(g, -t, kb, -1), -free_kernel(g, 1 - t, 0, 1),
      -free_kernel(g, 1 - t, kb, 1);
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
  if (!lu.isInvertible()) throw SolverError("kernel_at: boundary system is singular");
  g.h = lu.solve(rhs).cwiseProduct(cs);
  return g;
}

std::array<double, 8> kernel_residuals(const GreensKernel& g) {
  std::array<double, 8> r{};
  const int kb = boundary_order(g.params);
  const std::array<std::pair<double, int>, 4> bcs{{{0.0, 0}, {0.0, kb}, {1.0, 0}, {1.0, kb}}};
  for (int i = 0; i < 4; ++i) {
    const auto [x0, k] = bcs[i];
    const int side = x0 >= g.t ? 1 : -1;
    const double kpart = free_kernel(g, x0 - g.t, k, side);
    const double hpart = g.h.dot(char_basis(g.roots, x0, k));
    const double scale = std::max({std::abs(kpart), std::abs(hpart), std::abs(g.a2) * std::pow(g.roots.mu2, k)});
    r[i] = std::abs(kpart + hpart) / scale;
  }
  for (int k = 0; k < 3; ++k) {
    const double jump = g.at_source(1, k) - g.at_source(-1, k);
    const double scale = std::abs(g.a1) * std::pow(g.roots.mu1, k) + std::abs(g.a2) * std::pow(g.roots.mu2, k);
    r[4 + k] = std::abs(jump) / scale;
  }
  const double target = 1.0 / (g.params.epsilon * g.params.epsilon);
  r[7] = std::abs(g.at_source(1, 3) - g.at_source(-1, 3) - target) / target;
  return r;
}

std::vector<double> graded_breakpoints(double epsilon, const std::vector<double>& focus) {
  std::vector<double> bp{0.0, 1.0};
  for (double f : focus) {
    if (f > 0.0 && f < 1.0) bp.push_back(f);
    for (double d = epsilon / 10; d < 1.0; d *= 2) {
      if (f - d > 0.0) bp.push_back(f - d);
      if (f + d < 1.0) bp.push_back(f + d);
    }
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> out;
  for (double v : bp)
    if (out.empty() || v - out.back() > 1e-15) out.push_back(v);
  return out;
}

double moment_integral(const GreensParams& p, double x0, int deriv, int k) {
  const auto bp = graded_breakpoints(p.epsilon / std::max(1.0, std::sqrt(p.b)), {0.0, x0, 1.0});
  return integrate(bp, [&](double t) { return kernel_at(p, t)(x0, deriv) * std::pow(t, k); });
}

double double_integral(const GreensParams& p, int k, int deriv) {
  if (k < 0 || k > 3 || (deriv != 2 && deriv != 3)) throw ValidationError("double_integral: k in 0..3, deriv in {2,3}");
  return double_integrals_all(p)(deriv - 2, k);
}

double load_integral(const GreensParams& p, double x) { return moment_integral(p, x, 0, 0); }

double absolute_moment(const GreensParams& p, double x0, int deriv) {
  const auto bp = graded_breakpoints(p.epsilon / std::max(1.0, std::sqrt(p.b)), {0.0, x0, 1.0});
  return integrate(bp, [&](double t) { return std::abs(kernel_at(p, t)(x0, deriv)); });
}

std::array<Eigen::Vector4d, 4> hermite_basis(HermiteKind kind) {
  if (kind == HermiteKind::value_derivative)
    return {Eigen::Vector4d(1, 0, -3, 2), Eigen::Vector4d(0, 0, 3, -2), Eigen::Vector4d(0, 1, -2, 1),
            Eigen::Vector4d(0, 0, -1, 1)};
  // rows: v(0), v(1), v''(0), v''(1) applied to 1, x, x^2, x^3
  Eigen::Matrix4d E;
  E << 1, 0, 0, 0, 1, 1, 1, 1, 0, 0, 2, 0, 0, 0, 2, 6;
  const Eigen::Matrix4d C = E.fullPivLu().inverse();
  return {C.col(0), C.col(1), C.col(2), C.col(3)};
}

double eval_cubic(const Eigen::Vector4d& p, double x, int deriv) {
  double v = 0.0;
  for (int j = 3; j >= deriv; --j) {
    double f = 1.0;
    for (int i = 0; i < deriv; ++i) f *= j - i;
    v = v * x + f * p(j);
  }
  return v;
}

StabilityMatrix assemble_A(const GreensParams& p, double d) {
  if (p.variant != GreensVariant::m1) throw ValidationError("assemble_A is defined for the m1 variant only");
  const auto H = hermite_basis(HermiteKind::value_derivative);
  Eigen::Matrix<double, 2, 4> M1, M0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 4; ++k) {
      M1(j, k) = moment_integral(p, 1.0, j + 2, k);
      M0(j, k) = moment_integral(p, 0.0, j + 2, k);
    }
  const Eigen::Matrix<double, 2, 4> D = double_integrals_all(p);

  const Eigen::Vector4d l1 = apply_L(H[0], p.b, p.c), l2 = apply_L(H[1], p.b, p.c);
  const Eigen::Vector4d l3 = apply_L(H[2], p.b, p.c), l4 = apply_L(H[3], p.b, p.c);
  StabilityMatrix S;
  std::array<Eigen::Vector2d, 4> F;  // (F_i''(1), F_i'''(1))
  F[0] = M1 * l2;
  F[1] = M1 * l4;
  F[2] = M0 * (l1 + d * H[1]) - d * (D * l2);
  F[3] = M0 * (l3 + d * H[3]) - d * (D * l4);
  for (int i = 0; i < 4; ++i) {
    S.f2[i] = F[i](0);
    S.f3[i] = F[i](1);
  }
  const double e = p.epsilon;
  S.A << e * (F[2](0) - F[0](0)), e * (F[3](0) - F[1](0) - 8), e * e * (F[2](1) - F[0](1) + 24),
      e * e * (F[3](1) - F[1](1));
  S.det = S.A.determinant();
  S.inverse_norm = S.A.inverse().cwiseAbs().rowwise().sum().maxCoeff();
  return S;
}

LeadingConstants leading_constants() {
  const double e = std::numbers::e, e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
  const double q = e2 - 1;
  LeadingConstants k;
  k.moment_at_1 = {(e - 1) / (e + 1), 2 / q, (e2 - 4 * e + 5) / q, (16 - 2 * e2) / q};
  k.moment_at_0 = {(e - 1) / (e + 1), (e2 - 2 * e - 1) / q, (2 * e2 - 6 * e + 2) / q, (6 * e2 - 14 * e - 6) / q};
  k.double_at_0 = {(e2 - 2 * e - 1) / (2 * (1 + e) * (1 + e)), (e4 - 2 * e3 - 2 * e2 + 1) / (q * q),
                   (3 * e4 - 10 * e3 + 4 * e2 + 4 * e - 3) / (q * q),
                   (12 * e4 - 26 * e3 - 24 * e2 + 12 * e + 12) / (q * q)};
  const double r = std::sqrt(e) - 1;
  k.half_load = r * r / (e + 1);
  return k;
}

double closed_form_det_leading(double b, double c, double d) {
  const double e = std::numbers::e, e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
  const double q2 = (e2 - 1) * (e2 - 1);
  return -4 * (e4 + 4 * e3 - 27 * e2 + 10 * e + 36) / q2 * c * c -
         24 * (e4 - 5 * e3 + 10 * e2 - 11 * e + 3) / q2 * b * d -
         24 * (2 * e4 - 9 * e3 + 17 * e2 - 11 * e - 3) / q2 * b * c -
         4 * (5 * e2 - 25 * e + 31) / (1 - e2) * c * d -
         4 * (9 * e4 - 47 * e3 + 59 * e2 + 26 * e - 54) / q2 * c * c * d -
         6 * (3 * e4 - 12 * e3 + 22 * e2 - 40 * e + 23) / q2 * b * c * d;
}

Eigen::Matrix2d closed_form_A_leading(double b, double c, double d) {
  const double e = std::numbers::e, e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
  const double q = e2 - 1, q2 = q * q;
  const double bd = (3 * e4 - 8 * e3 + 1);
  const double cd1 = 15 * e4 - 22 * e3 - 60 * e2 + 12 * e + 33;
  const double cd2 = 9 * e4 - 16 * e3 - 28 * e2 + 8 * e + 15;
  Eigen::Matrix2d A;
  A(0, 0) = 12 * (3 - e) / (e - 1) * b + 6 * bd / q2 * b * d + (17 * e2 - 26 * e - 39) / q * c - cd1 / q2 * c * d -
            2 * (3 * e2 - 5 * e - 9) / q * d;
  A(0, 1) = 6 * (e - 3) / (e - 1) * b - 3 * bd / q2 * b * d - (7 * e2 - 10 * e - 21) / q * c + cd2 / q2 * c * d +
            4 * (e2 - 2 * e - 2) / q * d;
  A(1, 0) = 36 * (e - 1) / (e + 1) * b - 6 * bd / q2 * b * d - (3 * e - 5) / (e - 1) * c + cd1 / q * c * d +
            2 * (3 * e2 - 5 * e - 9) / q * d;
  A(1, 1) = -18 * (e - 1) / (e + 1) * b + 3 * bd / q * b * d + (e - 1) / (e + 1) * c - cd2 / q2 * c * d -
            4 * (e2 - 2 * e - 2) / q * d;
  return A;
}

StabilityReport stability_bound_check(const std::vector<GreensParams>& params) {
  StabilityReport rep;
  rep.min_load = std::numeric_limits<double>::infinity();
  rep.max_load_excess = -std::numeric_limits<double>::infinity();
  for (const auto& p : params) {
    const double e = p.epsilon;
    const double half = load_integral(p, 0.5);
    rep.epsilons.push_back(e);
    rep.half_load.push_back(half);
    rep.scaled_abs_xx.push_back(e * absolute_moment(p, 0.0, 2));
    rep.scaled_abs_xxx.push_back(e * e * absolute_moment(p, 0.0, 3));
    for (int i = 1; i <= 9; ++i) {
      const double v = load_integral(p, 0.1 * i);
      rep.min_load = std::min(rep.min_load, v);
      rep.max_load_excess = std::max(rep.max_load_excess, v - half);
    }
  }
  rep.positive = rep.min_load >= -1e-10;
  rep.bounded_by_half = rep.max_load_excess <= 1e-8;
  return rep;
}

std::vector<GreensRow> greens_table(const std::vector<double>& epsilons, GreensVariant variant, double b, double c,
                                    double d) {
  std::vector<GreensRow> rows;
  auto add = [&](std::string name, double eps, double computed, double target, bool has_target) {
    GreensRow r{std::move(name), eps, computed, target, 0.0, has_target};
    r.rel_error = has_target ? std::abs(computed - target) / std::max(std::abs(target), 1e-300) : 0.0;
    rows.push_back(std::move(r));
  };
  const auto K = leading_constants();
  const bool unit = b == 1.0 && c == 1.0;
  for (double eps : epsilons) {
    GreensParams p{b, c, eps, variant};
    if (variant == GreensVariant::m2) {
      double worst = 0.0;
      for (int i = 1; i < 50; ++i) {
        const auto res = kernel_residuals(kernel_at(p, i / 50.0));
        worst = std::max(worst, *std::max_element(res.begin(), res.end()));
      }
      add("max kernel residual", eps, worst, 0.0, false);
      add("int G(1/2,t)", eps, load_integral(p, 0.5), 0.0, false);
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      const std::string tk = "t^" + std::to_string(k);
      add("eps*int Gxx(1,t)" + tk, eps, eps * moment_integral(p, 1.0, 2, k), K.moment_at_1[k], unit);
      add("eps*int Gxx(0,t)" + tk, eps, eps * moment_integral(p, 0.0, 2, k), K.moment_at_0[k], unit);
      add("eps^2*int Gxxx(1,t)" + tk, eps, eps * eps * moment_integral(p, 1.0, 3, k), K.moment_at_1[k], unit);
      add("eps^2*int Gxxx(0,t)" + tk, eps, eps * eps * moment_integral(p, 0.0, 3, k), -K.moment_at_0[k], unit);
    }
    const auto D = double_integrals_all(p);
    for (int k = 0; k < 4; ++k) {
      const std::string sk = "s^" + std::to_string(k);
      add("eps*int Gxx(0,t)int G(t,s)" + sk, eps, eps * D(0, k), K.double_at_0[k], unit);
      add("eps^2*int Gxxx(0,t)int G(t,s)" + sk, eps, eps * eps * D(1, k), -K.double_at_0[k], unit);
    }
    add("int G(1/2,t)", eps, load_integral(p, 0.5), K.half_load, unit);
    add("det(A)", eps, assemble_A(p, d).det, closed_form_det_leading(b, c, d), true);
  }
  return rows;
}

}  // namespace spshift
