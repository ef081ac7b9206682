#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spshift/exceptions.hpp"
#include "spshift/fem.hpp"
#include "spshift/greens.hpp"

using namespace spshift;
using doctest::Approx;

namespace {

GreensParams unit(double eps, GreensVariant v = GreensVariant::m1) { return {1.0, 1.0, eps, v}; }

double max_residual(const GreensKernel& g) {
  const auto r = kernel_residuals(g);
  return *std::max_element(r.begin(), r.end());
}

}  // namespace

TEST_CASE("characteristic roots") {
  const auto r = char_roots({1, 2, 0.1});
  // direct evaluation in double: 9.897389314012417, 1.428875350362238
  CHECK(r.mu1 == Approx(9.897389314012417).epsilon(1e-13));
  CHECK(r.mu2 == Approx(1.428875350362238).epsilon(1e-13));
  // the six-digit example value differs in its last digit
  CHECK(r.mu1 == Approx(9.89741).epsilon(1e-5));
  CHECK(r.mu2 == Approx(1.42887).epsilon(1e-5));
  for (double eps : {1e-3, 1e-4, 1e-6}) {
    const auto s = char_roots({1.7, 2.0, eps});
    CHECK(s.mu1 * eps == Approx(std::sqrt(1.7)).epsilon(3 * eps * eps));
    CHECK(s.mu2 == Approx(std::sqrt(2.0 / 1.7)).epsilon(3 * eps * eps));
  }
  CHECK(char_roots({1, 0, 0.1}).mu2 == 0.0);
  CHECK_THROWS_AS(char_roots({1, 1, 0.6}), ValidationError);
}

TEST_CASE("kernel residuals on a 50-point grid") {
  for (auto v : {GreensVariant::m1, GreensVariant::m2})
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6})
      for (int i = 1; i < 50; ++i) CHECK(max_residual(kernel_at({1, 2, eps, v}, i / 50.0)) <= 1e-10);
  for (double t : {0.1, 0.5, 0.9}) CHECK(max_residual(kernel_at(unit(1e-2), t)) <= 1e-10);
  CHECK_THROWS_AS(kernel_at(unit(1e-2), 0.0), ValidationError);
}

TEST_CASE("kernel is symmetric") {
  for (auto v : {GreensVariant::m1, GreensVariant::m2})
    for (int i = 0; i < 20; ++i) {
      const double x = 0.03 + 0.047 * i, t = 0.97 - 0.031 * i;
      const GreensParams p{1, 2, 1e-2, v};
      const double a = kernel_at(p, t)(x), b = kernel_at(p, x)(t);
      CHECK(a == Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("kernel reproduces the fem solution of the constant problem") {
  // eps^2 v'''' - b v'' + c v = 1 on (0,1); on (0,2) with y = 2x: (4 eps)^2 v'''' - 4b v'' + c v = 1
  for (auto [v, m] : {std::pair{GreensVariant::m1, 1}, {GreensVariant::m2, 2}}) {
    const double eps = 1e-2, b = 1, c = 2;
    const auto spec = make_constant_problem("g", 4 * eps, m, {4 * b, c, 0, 1});
    const auto sol = solve_problem(spec, build_stype(128, 4 * eps, 5, spec.beta, LayerFamily::bakhvalov_s), 4);
    const GreensParams p{b, c, eps, v};
    double worst = 0;
    for (double x = 0.05; x < 1; x += 0.05) worst = std::max(worst, std::abs(load_integral(p, x) - eval_field(sol, 2 * x).u));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("single moments approach their leading constants") {
  const auto K = leading_constants();
  for (int k = 0; k < 4; ++k) {
    double last1 = 1e300, last0 = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const double d1 = std::abs(eps * moment_integral(unit(eps), 1, 2, k) - K.moment_at_1[k]);
      const double d0 = std::abs(eps * moment_integral(unit(eps), 0, 2, k) - K.moment_at_0[k]);
      CHECK(d1 <= last1);
      CHECK(d0 <= last0);
      last1 = d1;
      last0 = d0;
    }
    CHECK(last1 <= 1e-2 * K.moment_at_1[k]);
    CHECK(last0 <= 1e-2 * K.moment_at_0[k]);
  }
  CHECK(K.moment_at_1[0] == Approx(0.4621172).epsilon(1e-6));
  CHECK(K.moment_at_1[1] == Approx(0.3130353).epsilon(1e-6));
}

TEST_CASE("third-derivative moments follow the second-derivative ones") {
  const double eps = 1e-4;
  for (int k = 0; k < 4; ++k) {
    const double r1 = eps * moment_integral(unit(eps), 1, 3, k) / moment_integral(unit(eps), 1, 2, k);
    const double r0 = eps * moment_integral(unit(eps), 0, 3, k) / moment_integral(unit(eps), 0, 2, k);
    CHECK(r1 == Approx(1.0).epsilon(5e-2));
    CHECK(r0 == Approx(-1.0).epsilon(5e-2));
  }
}

TEST_CASE("double integrals") {
  const auto K = leading_constants();
  const double eps = 1e-4;
  CHECK(K.double_at_0[0] == Approx(0.0344466).epsilon(1e-5));
  for (int k = 0; k < 4; ++k) {
    const double d2 = double_integral(unit(eps), k, 2), d3 = double_integral(unit(eps), k, 3);
    CHECK(eps * d2 == Approx(K.double_at_0[k]).epsilon(2e-2));
    CHECK(eps * d3 / d2 == Approx(-1.0).epsilon(5e-2));
  }
}

TEST_CASE("Hermite bases") {
  const auto H = hermite_basis(HermiteKind::value_derivative);
  CHECK(eval_cubic(H[0], 0) == 1.0);
  CHECK(eval_cubic(H[0], 1) == 0.0);
  CHECK(eval_cubic(H[0], 0, 1) == 0.0);
  CHECK(eval_cubic(H[0], 1, 1) == 0.0);
  for (int i = 0; i < 4; ++i) {
    const std::array<double, 4> dual{eval_cubic(H[i], 0), eval_cubic(H[i], 1), eval_cubic(H[i], 0, 1),
                                     eval_cubic(H[i], 1, 1)};
    for (int j = 0; j < 4; ++j) CHECK(std::abs(dual[j] - (i == j ? 1.0 : 0.0)) <= 1e-14);
  }
  const auto P = hermite_basis(HermiteKind::value_second_derivative);
  CHECK(eval_cubic(P[2], 0, 2) == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(eval_cubic(P[2], 0)) <= 1e-14);
  CHECK(std::abs(eval_cubic(P[2], 1)) <= 1e-14);
  CHECK(std::abs(eval_cubic(P[2], 1, 2)) <= 1e-14);
}

TEST_CASE("stability matrix at leading order") {
  const auto S = assemble_A(unit(1e-4), 1.0);
  // leading values from the reduced Green's function route
  CHECK(S.A(0, 0) == Approx(0.132421).epsilon(1e-2));
  CHECK(S.A(0, 1) == Approx(-2.059486).epsilon(1e-2));
  CHECK(S.A(1, 0) == Approx(2.493650).epsilon(1e-2));
  CHECK(S.A(1, 1) == Approx(0.0594862).epsilon(1e-2));
  CHECK(S.det == Approx(5.143514).epsilon(1e-2));
  CHECK(S.A.allFinite());
}

TEST_CASE("stability matrix: d = 0 drops the shift parts") {
  const auto p = unit(1e-3);
  const auto S0 = assemble_A(p, 0.0), S1 = assemble_A(p, 1.0), S2 = assemble_A(p, 2.0);
  // linear in d
  CHECK((S2.A - 2 * S1.A + S0.A).norm() <= 1e-8 * S1.A.norm());
  CHECK(S0.A.allFinite());
}

TEST_CASE("inverse of A stays bounded") {
  std::vector<double> norms;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) norms.push_back(assemble_A(unit(eps), 1.0).inverse_norm);
  CHECK(*std::max_element(norms.begin(), norms.end()) <= 10 * norms.back());
}

TEST_CASE("determinant against the closed-form leading value") {
  // the closed form evaluates to -12.92 here; the definitions give about 5.14
  const double target = closed_form_det_leading(1, 1, 1);
  CHECK(target == Approx(-12.9227).epsilon(1e-4));
  CHECK(closed_form_det_leading(1, 2, 1) == Approx(-24.8912).epsilon(1e-4));
  CHECK(assemble_A(unit(1e-4), 1.0).det == Approx(target).epsilon(5e-2));
}

TEST_CASE("A entries against their closed-form leading values") {
  const auto S = assemble_A(unit(1e-4), 1.0);
  const auto P = closed_form_A_leading(1, 1, 1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(S.A(i, j) == Approx(P(i, j)).epsilon(5e-2));
}

TEST_CASE("load integral bounds") {
  const auto rep = stability_bound_check({unit(1e-2), unit(1e-3), unit(1e-4)});
  CHECK(rep.half_load.back() == Approx(0.1131815).epsilon(1e-2));
  CHECK(std::abs(rep.half_load.back() - 0.11318) <= 1e-3);
  CHECK(rep.positive);
  CHECK(rep.bounded_by_half);
  const auto xx = std::minmax_element(rep.scaled_abs_xx.begin(), rep.scaled_abs_xx.end());
  const auto xxx = std::minmax_element(rep.scaled_abs_xxx.begin(), rep.scaled_abs_xxx.end());
  CHECK(*xx.second <= 2 * *xx.first);
  CHECK(*xxx.second <= 2 * *xxx.first);
}

TEST_CASE("verification table") {
  const auto rows = greens_table({1e-2, 1e-3, 1e-4}, GreensVariant::m1, 1, 1, 1);
  CHECK(rows.size() >= 36);
  bool det = false;
  for (const auto& r : rows) {
    if (r.name == "det(A)") det = true;
    else if (r.epsilon == 1e-4) CHECK(r.rel_error <= 1e-2);
  }
  CHECK(det);
  const auto m2 = greens_table({1e-2, 1e-3}, GreensVariant::m2, 1, 1, 1);
  for (const auto& r : m2) CHECK_FALSE(r.has_target);
}
