#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spshift/exceptions.hpp"
#include "spshift/mesh.hpp"

using namespace spshift;
using doctest::Approx;

TEST_CASE("transition_lambda") {
  CHECK(transition_lambda(0.01, 2, 1, 8) == Approx(0.02 * std::log(8.0)).epsilon(1e-15));
  CHECK(transition_lambda(0.01, 2, 1, 8) == Approx(0.0415888).epsilon(1e-6));
  CHECK(transition_lambda(0.2, 2, 1, 64) == 0.25);
  CHECK(transition_lambda(1e-4, 3, 1, 64) == Approx(1.2477e-3).epsilon(1e-4));
}

TEST_CASE("transition_mu and transition_nu") {
  CHECK(transition_mu(1, 1e-4, 1) == 0.25);
  CHECK(transition_mu(2, 1e-8, 1) == 0.25);
  CHECK(transition_mu(4, 1e-4, 1) == Approx(0.01).epsilon(1e-12));
  CHECK(transition_mu(3, 0.2, 1) == 0.25);
  CHECK(transition_nu(4, 1e-4, 5, 1, 64) == Approx(0.207944).epsilon(1e-5));
  CHECK(transition_nu(4, 0.5, 5, 1, 64) == 0.25);
  for (int q = 1; q <= 4; ++q)
    for (double eps : {1e-2, 1e-4, 1e-6})
      for (int N : {8, 64, 256}) CHECK(transition_nu(q, eps, q + 1.0, 1, N) >= transition_lambda(eps, q + 1.0, 1, N));
}

TEST_CASE("transition points are monotone in eps before the cap") {
  double l0 = 0, m0 = 0, n0 = 0;
  for (double eps = 1e-8; eps < 1; eps *= 1.7) {
    const double l = transition_lambda(eps, 3, 1, 64), m = transition_mu(4, eps, 1), n = transition_nu(4, eps, 5, 1, 64);
    CHECK(l >= l0);
    CHECK(m >= m0);
    CHECK(n >= n0);
    l0 = l;
    m0 = m;
    n0 = n;
  }
}

TEST_CASE("Shishkin N=8 nodes") {
  const auto m = build_stype(8, 0.01, 2, 1, LayerFamily::shishkin);
  const double lam = 0.02 * std::log(8.0);
  const std::vector<double> expect{0, lam, 0.5, 1 - lam, 1, 1 + lam, 1.5, 2 - lam, 2};
  REQUIRE(m.nodes.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(m.nodes(i) == Approx(expect[i]).epsilon(1e-14));
  const auto rep = mesh_diagnostics(m);
  CHECK(rep.h_max == Approx(0.5 - lam).epsilon(1e-13));
  CHECK(rep.h_max == Approx(0.458411).epsilon(1e-6));
  CHECK(rep.translate_symmetric);
  CHECK(rep.all_ok());
}

TEST_CASE("S-type meshes hit 1 and 2 exactly") {
  for (auto fam : {LayerFamily::shishkin, LayerFamily::bakhvalov_s})
    for (int N : {8, 16, 64, 256}) {
      const auto m = build_stype(N, 1e-4, 3, 1, fam);
      CHECK(m.nodes(N / 2) == 1.0);
      CHECK(m.nodes(N) == 2.0);
      CHECK(m.nodes(0) == 0.0);
    }
}

TEST_CASE("Bakhvalov-S layer cells") {
  const double eps = 1e-4, sigma = 3;
  const int N = 64;
  const auto m = build_stype(N, eps, sigma, 1, LayerFamily::bakhvalov_s);
  double hmax = 0;
  for (int i = 0; i < N / 8; ++i) hmax = std::max(hmax, m.width(i));
  // the last layer cell is the widest: (sigma eps/beta) ln(9 - 8/N)
  CHECK(hmax == Approx(sigma * eps * std::log(9.0 - 8.0 / N)).epsilon(1e-10));
  CHECK(hmax <= sigma * eps * std::log(9.0));
}

TEST_CASE("phi families") {
  for (int N : {8, 64, 1024}) {
    CHECK(mesh_phi(LayerFamily::shishkin, 0.0, N) == 0.0);
    CHECK(mesh_phi(LayerFamily::bakhvalov_s, 0.0, N) == 0.0);
    CHECK(mesh_phi(LayerFamily::shishkin, 0.5, N) == Approx(std::log(double(N))).epsilon(1e-14));
    CHECK(mesh_phi(LayerFamily::bakhvalov_s, 0.5, N) == Approx(std::log(double(N))).epsilon(1e-14));
    CHECK(max_dpsi(LayerFamily::shishkin, N) <= 2 * std::log(double(N)) + 1e-12);
    CHECK(max_dpsi(LayerFamily::bakhvalov_s, N) <= 2 + 1e-12);
  }
}

TEST_CASE("phi templates work for long double") {
  const long double v = mesh_phi<long double>(LayerFamily::bakhvalov_s, 0.25L, 64);
  CHECK(static_cast<double>(v) == Approx(-std::log(1 - 0.5 * (1 - 1.0 / 64))).epsilon(1e-15));
}

TEST_CASE("weak equidistant mesh") {
  const double eps = 1e-4;
  const int N = 64, q = 4;
  const auto m = build_weak_equidistant(N, eps, q + 1.0, 1, q, LayerFamily::bakhvalov_s);
  const auto rep = mesh_diagnostics(m);
  CHECK(rep.all_ok());
  CHECK_FALSE(rep.translate_symmetric);
  // inner region (1-mu, 1+mu) with N/4 cells
  CHECK(m.width(3 * N / 8) == Approx(2 * 0.01 / 16).epsilon(1e-12));
  CHECK(m.width(3 * N / 8) == Approx(1.25e-3).epsilon(1e-12));
  int total = 0;
  for (int c : rep.region_cells) total += c;
  CHECK(total == N);
  REQUIRE(rep.region_cells.size() == 5);
  CHECK(rep.region_cells == std::vector<int>{N / 8, N / 4, N / 4, N / 4, N / 8});

  // q = 2: mu = 1/4, inner widths O(1/N)
  for (int n : {16, 64, 256}) {
    const auto w = build_weak_equidistant(n, eps, 3, 1, 2, LayerFamily::bakhvalov_s);
    CHECK(mesh_diagnostics(w).h_max * n <= 4.0 + 1e-12);
  }
}

TEST_CASE("weak S-type mesh") {
  const auto m = build_weak_stype(64, 1e-4, 5, 1, 4, LayerFamily::bakhvalov_s);
  const auto rep = mesh_diagnostics(m);
  CHECK(rep.all_ok());
  CHECK(m.inner_transition == Approx(transition_nu(4, 1e-4, 5, 1, 64)));
  CHECK(m.nodes(3 * 64 / 8) == Approx(1 - m.inner_transition).epsilon(1e-14));

  // q = 4 grading uses the eps^(1/2) scale
  CHECK(weak_layer_scale(4, 1e-4) == Approx(0.01).epsilon(1e-12));

  // nu capped at 1/4: the graded inner cells become uniform and meet at 1
  const auto capped = build_weak_stype(64, 0.3, 5, 1, 4, LayerFamily::bakhvalov_s);
  const auto crep = mesh_diagnostics(capped);
  CHECK(crep.capped);
  CHECK(crep.strictly_increasing);
  CHECK(capped.nodes(32) == 1.0);
}

TEST_CASE("weak S-type with both transitions capped stays valid") {
  // lambda = nu = 1/4: the graded regions turn uniform and never overlap
  const auto m = build_weak_stype(8, 0.5, 40, 1, 4, LayerFamily::bakhvalov_s, LayerFamily::shishkin, 0.99);
  const auto rep = mesh_diagnostics(m);
  CHECK(m.lambda_capped());
  CHECK(m.inner_capped());
  CHECK(rep.all_ok());
  CHECK_THROWS_AS(build_weak_stype(8, 0.5, 4, 1, 4, LayerFamily::bakhvalov_s, LayerFamily::shishkin, 1.5),
                  ValidationError);
}

TEST_CASE("capped lambda falls back to uniform layer regions") {
  for (auto fam : {LayerFamily::shishkin, LayerFamily::bakhvalov_s}) {
    const auto m = build_stype(64, 0.5, 3, 1, fam);
    const auto rep = mesh_diagnostics(m);
    CHECK(m.lambda_capped());
    CHECK(rep.capped);
    CHECK(rep.all_ok());
    CHECK(m.width(0) == Approx(0.25 / 8).epsilon(1e-12));
  }
}

TEST_CASE("mixed boundary and inner families") {
  MeshParams p;
  p.N = 64;
  p.epsilon = 1e-4;
  p.sigma = 3;
  p.q = 2;
  p.boundary = LayerFamily::bakhvalov_s;
  p.inner = MeshFamily::shishkin;
  const auto m = build_mesh(p);
  const auto rep = mesh_diagnostics(m);
  CHECK(rep.all_ok());
  // the boundary cells at 0 and 2 use the same family
  CHECK(m.width(0) == Approx(m.width(63)).epsilon(1e-10));
}

TEST_CASE("N must be divisible by 8") {
  CHECK_THROWS_AS(build_stype(12, 1e-2, 2, 1, LayerFamily::shishkin), ValidationError);
  CHECK_THROWS_AS(build_uniform(0), ValidationError);
}

TEST_CASE("node export uses 17 digits") {
  const auto m = build_stype(8, 0.01, 2, 1, LayerFamily::shishkin);
  std::ostringstream os;
  write_nodes(m, os);
  std::istringstream is(os.str());
  double v;
  int i = 0;
  while (is >> v) CHECK(v == m.nodes(i++));
  CHECK(i == 9);
}

TEST_CASE("family names round-trip") {
  for (auto f : {LayerFamily::shishkin, LayerFamily::bakhvalov_s}) CHECK(layer_family_from_string(to_string(f)) == f);
  for (auto f : {MeshFamily::shishkin, MeshFamily::bakhvalov_s, MeshFamily::weak_equidistant, MeshFamily::weak_stype})
    CHECK(mesh_family_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(mesh_family_from_string("chebyshev"), ValidationError);
}
