#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spshift/asymptotics.hpp"
#include "spshift/errors.hpp"
#include "spshift/exceptions.hpp"

using namespace spshift;
using doctest::Approx;

namespace {

const LayerComponent& ex1_s0() {
  static const LayerComponent s0 = solve_reduced(make_example1(1e-3));
  return s0;
}

}  // namespace

TEST_CASE("reduced solution of ex1 satisfies its equation") {
  const auto& s = ex1_s0();
  for (double x : {0.05, 0.3, 0.77, 0.95}) CHECK(std::abs(-s(x, 2) + 2 * s(x) - 5) <= 1e-6);
  for (double x : {1.05, 1.4, 1.9}) CHECK(std::abs(-s(x, 2) + 2 * s(x) + s(x - 1) - 5) <= 1e-6);
  CHECK(std::abs(s(0.0)) <= 1e-14);
  CHECK(std::abs(s(2.0)) <= 1e-14);
}

TEST_CASE("reduced solve: manufactured solution") {
  const double pi = std::numbers::pi;
  auto g = [pi](double x) { return std::sin(pi * x) * x * (2 - x) / 2; };
  auto g2 = [pi](double x) {
    const double s = std::sin(pi * x), c = std::cos(pi * x), p = x * (2 - x);
    return (-pi * pi * s * p + 2 * pi * c * (2 - 2 * x) - 2 * s) / 2;
  };
  auto spec = make_constant_problem("mms", 1e-3, 1, {1, 2, 0, 0});
  spec.f = [&](double x) { return -g2(x) + 2 * g(x); };
  spec.constants.reset();
  const auto s = solve_reduced(spec);
  for (double x = 0; x <= 2; x += 0.05) CHECK(std::abs(s(x) - g(x)) <= 1e-8);
}

TEST_CASE("zero data gives a zero reduced solution") {
  const auto s = solve_reduced(make_constant_problem("z", 1e-3, 1, {1, 2, 1, 0}));
  CHECK(s.field->coeffs().lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("finite difference weights") {
  const std::vector<double> pts{0, 0.1, 0.2, 0.3, 0.4};
  const auto w = fd_weights(0.0, pts, 1);
  double d = 0;
  for (int i = 0; i < 5; ++i) d += w(i) * std::pow(pts[i], 4);
  CHECK(std::abs(d) <= 1e-10);
  d = 0;
  for (int i = 0; i < 5; ++i) d += w(i) * pts[i];
  CHECK(d == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary layer terms") {
  for (int m : {1, 2}) {
    const auto spec = make_named_problem("ex1", 1e-3, m);
    const auto& s0 = ex1_s0();
    const auto data = reduced_data(s0);
    const auto e = boundary_layer_leading(spec, data, Side::left);
    // e^{-sqrt(b) t} solves E'''' - b E'' = 0
    for (double t : {0.0, 0.5, 3.0, 12.0}) CHECK(std::abs(e.scaled(t, 4) - e.scaled(t, 2)) <= 1e-12 * std::abs(e.alpha));
    if (m == 1) {
      CHECK(e(0.0, 1) == Approx(-data.d1_left).epsilon(1e-12));
      const auto er = boundary_layer_leading(spec, data, Side::right);
      CHECK(er(2.0, 1) == Approx(-data.d1_right).epsilon(1e-12));
    } else {
      CHECK(e(0.0, 2) == Approx(-data.d2_left).epsilon(1e-12));
    }
    // |E^(k)(x)| <= |A| b^{k/2} eps^{m-k} e^{-beta x/eps}
    for (int k = 0; k <= 5; ++k)
      for (double x = 1e-6; x < 0.05; x *= 1.5)
        CHECK(std::abs(e(x, k)) <= std::abs(e.alpha) * std::pow(1e-3, m - k) * std::exp(-x / 1e-3) * (1 + 1e-12));
    // eps E'' carries eps^{m-1-k}
    for (int k = 0; k <= 3; ++k)
      CHECK(std::abs(1e-3 * e(0.0, k + 2)) == Approx(std::abs(e.alpha) * std::pow(1e-3, m - 1 - k)).epsilon(1e-12));
  }
}

TEST_CASE("inner layer terms solve their half-line problems") {
  const auto spec = make_example1(1e-3);
  const auto dec = build_decomposition(spec);
  const double d = 1.0;
  struct Side {
    const LayerComponent& w;
    double forcing;
  };
  for (const Side s : {Side{dec.w_left, dec.e_right.alpha}, Side{dec.w_right, dec.e_left.alpha}})
    for (double t = 0; t <= 30; t += 0.25) {
      const double res = s.w.scaled(t, 4) - s.w.scaled(t, 2) + d * s.forcing * std::exp(-t);
      CHECK(std::abs(res) <= 1e-12 * (std::abs(s.w.alpha) + std::abs(s.w.gamma) + std::abs(s.forcing)));
    }
  // matching: W'' continuous and V0''' continuous at 1
  CHECK(dec.w_left(1.0, 2) == Approx(dec.w_right(1.0, 2)).epsilon(1e-10));
  const double jump3 = dec.w_right(1.0, 3) - dec.w_left(1.0, 3);
  CHECK(jump3 == Approx(-dec.data.jump3).epsilon(1e-10));
}

TEST_CASE("no shift and no jump give no inner layer") {
  auto k = *make_example1(1e-3).constants;
  k.d = 0;
  const auto spec = make_constant_problem("d0", 1e-3, 1, k);
  ReducedData data;
  data.jump3 = 0;
  LayerComponent e;
  e.alpha = 3.0;
  const auto w = inner_layer_leading(spec, e, e, data);
  CHECK(w.left.alpha == 0.0);
  CHECK(w.right.alpha == 0.0);
  CHECK(w.left.gamma == 0.0);
  CHECK(w.right.gamma == 0.0);

  // full pipeline: the reduced jump vanishes up to finite-difference error
  const auto dec = build_decomposition(spec);
  CHECK(std::abs(dec.data.jump3) <= 1e-4);
  CHECK(std::abs(dec.w_left.alpha) <= 1e-4);
}

TEST_CASE("inner layer decay bound") {
  // |W^(k)(x)| <= C eps^{3-k} e^{-0.9 beta (1-x)/eps} on (0,1), C independent of eps
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto dec = build_decomposition(make_example1(eps));
    for (int k = 0; k <= 4; ++k) {
      double C = 0;
      for (double t = 0; t <= 60; t += 0.01) C = std::max(C, std::abs(dec.w_left.scaled(t, k)) * std::exp(0.9 * t));
      for (double s = 1e-7; s < 0.5; s *= 1.3) {
        const double x = 1 - s;
        CHECK(std::abs(dec.w_left(x, k)) <= 1.001 * C * std::pow(eps, 3 - k) * std::exp(-0.9 * s / eps) + 1e-300);
      }
    }
  }
}

TEST_CASE("decomposition tracks the discrete solution") {
  std::vector<double> diff;
  for (double eps : {1e-2, 1e-3}) {
    const auto spec = make_example1(eps);
    const auto sol = solve_problem(spec, build_stype(256, eps, 4, 1, LayerFamily::bakhvalov_s), 3);
    const auto rep = decomposition_compare(spec, sol, build_decomposition(spec));
    CHECK(std::abs(rep.inner_layer_location - 1.0) <= 0.05);
    diff.push_back(rep.max_difference);
  }
  CHECK(diff[0] / diff[1] >= 5);
}

TEST_CASE("layer norm scalings") {
  for (int m : {1, 2}) {
    std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5}, e, w;
    for (double ep : eps) {
      const auto spec = make_named_problem("ex1", ep, m);
      const auto dec = build_decomposition(spec);
      e.push_back(layer_pair_norm(spec, dec.e_left));
      if (m == 1) w.push_back(layer_pair_norm(spec, dec.w_left));
    }
    CHECK(loglog_slope(eps, e) == Approx(m - 0.5).epsilon(0.1 / (m - 0.5)));
    if (m == 1) CHECK(std::abs(loglog_slope(eps, w) - 2.5) <= 0.1);
  }
}

TEST_CASE("variable coefficients are rejected by the closed forms") {
  auto spec = make_example1(1e-3);
  spec.constants.reset();
  CHECK_THROWS_AS(build_decomposition(spec), ValidationError);
}
