#include "spshift/mesh.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>

#include "spshift/exceptions.hpp"

namespace spshift {

std::string to_string(LayerFamily f) { return f == LayerFamily::shishkin ? "shishkin" : "bakhvalov_s"; }

std::string to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::shishkin: return "shishkin";
    case MeshFamily::bakhvalov_s: return "bakhvalov_s";
    case MeshFamily::weak_equidistant: return "weak_equidistant";
    case MeshFamily::weak_stype: return "weak_stype";
  }
  return "unknown";
}

LayerFamily layer_family_from_string(const std::string& s) {
  if (s == "shishkin" || s == "S") return LayerFamily::shishkin;
  if (s == "bakhvalov_s" || s == "bakhvalov-s" || s == "bs" || s == "BS") return LayerFamily::bakhvalov_s;
  throw ValidationError("unknown boundary mesh family '" + s + "' (expected shishkin or bakhvalov_s)");
}

MeshFamily mesh_family_from_string(const std::string& s) {
  if (s == "shishkin" || s == "S") return MeshFamily::shishkin;
  if (s == "bakhvalov_s" || s == "bakhvalov-s" || s == "bs" || s == "BS") return MeshFamily::bakhvalov_s;
  if (s == "weak_equidistant" || s == "weakeq") return MeshFamily::weak_equidistant;
  if (s == "weak_stype" || s == "weakshishkin" || s == "weakS") return MeshFamily::weak_stype;
  throw ValidationError("unknown inner mesh family '" + s +
                        "' (expected shishkin, bakhvalov_s, weak_equidistant or weak_stype)");
}

double transition_lambda(double epsilon, double sigma, double beta, int N) {
  return std::min(sigma * epsilon * std::log(double(N)) / beta, 0.25);
}

double weak_layer_scale(int q, double epsilon, std::optional<double> exponent) {
  const double e = exponent ? *exponent : 1.0 - 5.0 / (2.0 * (q + 1));
  return std::pow(epsilon, e);
}

double transition_mu(int q, double epsilon, double beta, std::optional<double> exponent) {
  if (!exponent && q <= 2) return 0.25;
  return std::min(weak_layer_scale(q, epsilon, exponent) / beta, 0.25);
}

double transition_nu(int q, double epsilon, double sigma, double beta, int N, std::optional<double> exponent) {
  return std::min(sigma * weak_layer_scale(q, epsilon, exponent) * std::log(double(N)) / beta, 0.25);
}

bool Mesh1D::lambda_capped() const {
  return std::any_of(regions.begin(), regions.end(), [&](const MeshRegion& r) {
    return r.capped && (r.anchor == 0.0 || r.anchor == 2.0);
  });
}

bool Mesh1D::inner_capped() const {
  if (family == MeshFamily::weak_equidistant) return inner_transition >= 0.25;
  return std::any_of(regions.begin(), regions.end(),
                     [&](const MeshRegion& r) { return r.capped && r.anchor == 1.0; });
}

namespace {

void check_common(int N, double epsilon, double sigma, double beta) {
  if (N < 8 || N % 8 != 0) throw ValidationError("N must be a positive multiple of 8, got " + std::to_string(N));
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
}

void check_exponent(std::optional<double> e) {
  if (e && !(*e > 0.0 && *e <= 1.0)) throw ValidationError("weak_exponent must lie in (0,1]");
}

struct Grading {
  LayerFamily family;
  double scale;       // eps or the weak-layer scale
  double transition;  // lambda or nu
  bool capped;
};

Grading grading(LayerFamily family, double scale, double sigma, double beta, int N) {
  const double raw = sigma * scale * std::log(double(N)) / beta;
  return {family, scale, std::min(raw, 0.25), raw >= 0.25};
}

// Offsets 0 = g_0 < ... < g_{N/8} = transition measured from the anchor.
std::vector<double> graded_offsets(const Grading& g, int N, double sigma, double beta) {
  const int n = N / 8;
  std::vector<double> off(n + 1);
  for (int i = 0; i <= n; ++i) {
    off[i] = g.capped ? g.transition * i / n : sigma * g.scale / beta * mesh_phi(g.family, 4.0 * i / N, N);
  }
  off[0] = 0.0;
  off[n] = g.transition;
  return off;
}

void append_uniform(std::vector<double>& x, double a, double b, int cells) {
  for (int i = 1; i < cells; ++i) x.push_back(a + (b - a) * i / cells);
  x.push_back(b);
}

MeshRegion graded_region(const Grading& g, int first, int cells, double anchor, int dir, double sigma, double beta) {
  MeshRegion r;
  r.kind = g.capped ? MeshRegion::Kind::uniform : MeshRegion::Kind::graded;
  r.first_cell = first;
  r.cells = cells;
  r.a = dir > 0 ? anchor : anchor - g.transition;
  r.b = dir > 0 ? anchor + g.transition : anchor;
  r.family = g.family;
  r.anchor = anchor;
  r.direction = dir;
  r.layer_scale = g.scale;
  r.capped = g.capped;
  (void)sigma;
  (void)beta;
  return r;
}

MeshRegion uniform_region(int first, int cells, double a, double b) {
  MeshRegion r;
  r.first_cell = first;
  r.cells = cells;
  r.a = a;
  r.b = b;
  return r;
}

// S-type layout on [0,1]: graded at 0 (outer), uniform, graded towards 1 (inner).
std::vector<double> stype_half(const Grading& outer, const Grading& inner, int N, double sigma, double beta) {
  const auto lo = graded_offsets(outer, N, sigma, beta);
  const auto hi = graded_offsets(inner, N, sigma, beta);
  const double a = outer.transition, b = 1.0 - inner.transition;
  if (!(a < b)) throw ValidationError("mesh regions collide: transition points are not increasing");
  std::vector<double> x(lo.begin(), lo.end());
  append_uniform(x, a, b, N / 4);
  for (int i = N / 8 - 1; i >= 0; --i) x.push_back(1.0 - hi[i]);
  x.back() = 1.0;
  return x;
}

Mesh1D assemble_mirrored(const std::vector<double>& half) {
  const int n2 = static_cast<int>(half.size()) - 1;
  Mesh1D mesh;
  mesh.nodes.resize(2 * n2 + 1);
  for (int i = 0; i <= n2; ++i) {
    mesh.nodes(i) = half[i];
    mesh.nodes(2 * n2 - i) = 2.0 - half[i];
  }
  mesh.nodes(n2) = 1.0;
  mesh.nodes(2 * n2) = 2.0;
  return mesh;
}

Mesh1D assemble_translated(const std::vector<double>& half) {
  const int n2 = static_cast<int>(half.size()) - 1;
  Mesh1D mesh;
  mesh.nodes.resize(2 * n2 + 1);
  for (int i = 0; i <= n2; ++i) {
    mesh.nodes(i) = half[i];
    mesh.nodes(n2 + i) = 1.0 + half[i];
  }
  mesh.nodes(n2) = 1.0;
  mesh.nodes(2 * n2) = 2.0;
  return mesh;
}

// Regions of an S-type layout; `translated` selects which family sits at each end of (1,2).
std::vector<MeshRegion> stype_regions(const Grading& outer, const Grading& inner, int N, bool translated,
                                      double sigma, double beta) {
  const int n8 = N / 8;
  std::vector<MeshRegion> r;
  r.push_back(graded_region(outer, 0, n8, 0.0, 1, sigma, beta));
  r.push_back(uniform_region(n8, 2 * n8, outer.transition, 1.0 - inner.transition));
  r.push_back(graded_region(inner, 3 * n8, n8, 1.0, -1, sigma, beta));
  if (translated) {
    r.push_back(graded_region(outer, 4 * n8, n8, 1.0, 1, sigma, beta));
    r.push_back(uniform_region(5 * n8, 2 * n8, 1.0 + outer.transition, 2.0 - inner.transition));
    r.push_back(graded_region(inner, 7 * n8, n8, 2.0, -1, sigma, beta));
  } else {
    r.push_back(graded_region(inner, 4 * n8, n8, 1.0, 1, sigma, beta));
    r.push_back(uniform_region(5 * n8, 2 * n8, 1.0 + inner.transition, 2.0 - outer.transition));
    r.push_back(graded_region(outer, 7 * n8, n8, 2.0, -1, sigma, beta));
  }
  return r;
}

Mesh1D stype_mesh(int N, double epsilon, double sigma, double beta, LayerFamily boundary, LayerFamily inner_family) {
  check_common(N, epsilon, sigma, beta);
  const Grading outer = grading(boundary, epsilon, sigma, beta, N);
  const Grading inner = grading(inner_family, epsilon, sigma, beta, N);
  const auto half = stype_half(outer, inner, N, sigma, beta);
  const bool translated = boundary == inner_family;
  Mesh1D mesh = translated ? assemble_translated(half) : assemble_mirrored(half);
  mesh.family = inner_family == LayerFamily::shishkin ? MeshFamily::shishkin : MeshFamily::bakhvalov_s;
  mesh.boundary_family = boundary;
  mesh.inner_grading = inner_family;
  mesh.epsilon = epsilon;
  mesh.beta = beta;
  mesh.sigma = sigma;
  mesh.lambda = outer.transition;
  mesh.inner_transition = inner.transition;
  mesh.regions = stype_regions(outer, inner, N, translated, sigma, beta);
  return mesh;
}

}  // namespace

Mesh1D build_stype(int N, double epsilon, double sigma, double beta, LayerFamily family) {
  return stype_mesh(N, epsilon, sigma, beta, family, family);
}

Mesh1D build_weak_equidistant(int N, double epsilon, double sigma, double beta, int q, LayerFamily boundary,
                              std::optional<double> weak_exponent) {
  check_common(N, epsilon, sigma, beta);
  check_exponent(weak_exponent);
  if (q < 1) throw ValidationError("q must be >= 1");
  const Grading outer = grading(boundary, epsilon, sigma, beta, N);
  const double mu = transition_mu(q, epsilon, beta, weak_exponent);
  const double lam = outer.transition;
  if (!(lam < 1.0 - mu)) throw ValidationError("mesh regions collide: lambda >= 1 - mu");
  const int n8 = N / 8;
  const auto lo = graded_offsets(outer, N, sigma, beta);

  std::vector<double> x(lo.begin(), lo.end());
  append_uniform(x, lam, 1.0 - mu, 2 * n8);
  append_uniform(x, 1.0 - mu, 1.0 + mu, 2 * n8);
  append_uniform(x, 1.0 + mu, 2.0 - lam, 2 * n8);
  for (int i = n8 - 1; i >= 0; --i) x.push_back(2.0 - lo[i]);

  Mesh1D mesh;
  mesh.nodes = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  mesh.nodes(4 * n8) = 1.0;
  mesh.nodes(N) = 2.0;
  mesh.family = MeshFamily::weak_equidistant;
  mesh.boundary_family = boundary;
  mesh.inner_grading = boundary;
  mesh.epsilon = epsilon;
  mesh.beta = beta;
  mesh.sigma = sigma;
  mesh.lambda = lam;
  mesh.inner_transition = mu;
  mesh.q_hint = q;
  mesh.regions = {graded_region(outer, 0, n8, 0.0, 1, sigma, beta), uniform_region(n8, 2 * n8, lam, 1.0 - mu),
                  uniform_region(3 * n8, 2 * n8, 1.0 - mu, 1.0 + mu),
                  uniform_region(5 * n8, 2 * n8, 1.0 + mu, 2.0 - lam),
                  graded_region(outer, 7 * n8, n8, 2.0, -1, sigma, beta)};
  return mesh;
}

Mesh1D build_weak_stype(int N, double epsilon, double sigma, double beta, int q, LayerFamily boundary,
                        LayerFamily grading_family, std::optional<double> weak_exponent) {
  check_common(N, epsilon, sigma, beta);
  check_exponent(weak_exponent);
  if (q < 1) throw ValidationError("q must be >= 1");
  const Grading outer = grading(boundary, epsilon, sigma, beta, N);
  const Grading inner = grading(grading_family, weak_layer_scale(q, epsilon, weak_exponent), sigma, beta, N);
  const auto half = stype_half(outer, inner, N, sigma, beta);
  Mesh1D mesh = assemble_mirrored(half);
  mesh.family = MeshFamily::weak_stype;
  mesh.boundary_family = boundary;
  mesh.inner_grading = grading_family;
  mesh.epsilon = epsilon;
  mesh.beta = beta;
  mesh.sigma = sigma;
  mesh.lambda = outer.transition;
  mesh.inner_transition = inner.transition;
  mesh.q_hint = q;
  mesh.regions = stype_regions(outer, inner, N, false, sigma, beta);
  return mesh;
}

Mesh1D build_uniform(int N) {
  if (N < 2 || N % 2 != 0) throw ValidationError("uniform mesh needs an even number of cells");
  Mesh1D mesh;
  mesh.nodes.resize(N + 1);
  for (int i = 0; i <= N; ++i) mesh.nodes(i) = 2.0 * i / N;
  mesh.nodes(N / 2) = 1.0;
  mesh.regions = {uniform_region(0, N, 0.0, 2.0)};
  return mesh;
}

Mesh1D build_mesh(const MeshParams& p) {
  if (p.q < 1) throw ValidationError("q must be >= 1");
  Mesh1D mesh;
  switch (p.inner) {
    case MeshFamily::shishkin:
      mesh = stype_mesh(p.N, p.epsilon, p.sigma, p.beta, p.boundary, LayerFamily::shishkin);
      break;
    case MeshFamily::bakhvalov_s:
      mesh = stype_mesh(p.N, p.epsilon, p.sigma, p.beta, p.boundary, LayerFamily::bakhvalov_s);
      break;
    case MeshFamily::weak_equidistant:
      mesh = build_weak_equidistant(p.N, p.epsilon, p.sigma, p.beta, p.q, p.boundary, p.weak_exponent);
      break;
    case MeshFamily::weak_stype:
      mesh = build_weak_stype(p.N, p.epsilon, p.sigma, p.beta, p.q, p.boundary, p.weak_grading, p.weak_exponent);
      break;
  }
  mesh.q_hint = p.q;
  return mesh;
}

double max_dpsi(LayerFamily family, int N, int samples) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(mesh_dpsi(family, 0.5 * i / (samples - 1), N)));
  return m;
}

MeshReport mesh_diagnostics(const Mesh1D& mesh) {
  MeshReport rep;
  const auto& x = mesh.nodes;
  const int N = mesh.cells();
  rep.divisible_by_8 = N >= 8 && N % 8 == 0;
  rep.h_min = std::numeric_limits<double>::infinity();
  rep.strictly_increasing = true;
  for (int i = 0; i < N; ++i) {
    const double h = x(i + 1) - x(i);
    rep.strictly_increasing = rep.strictly_increasing && h > 0.0;
    rep.h_min = std::min(rep.h_min, h);
    rep.h_max = std::max(rep.h_max, h);
  }
  rep.endpoints_exact = N > 0 && x(0) == 0.0 && x(N) == 2.0;
  for (const auto& r : mesh.regions) rep.region_cells.push_back(r.cells);
  if (!rep.divisible_by_8) return rep;

  const int n8 = N / 8;
  const double tol = 8 * std::numeric_limits<double>::epsilon();
  auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  rep.anchors_ok = x(n8) == mesh.lambda && near(x(3 * n8), 1.0 - mesh.inner_transition) && x(4 * n8) == 1.0 &&
                   near(x(5 * n8), 1.0 + mesh.inner_transition) && near(x(7 * n8), 2.0 - mesh.lambda);

  rep.translate_symmetric = true;
  for (int i = 0; i <= 4 * n8; ++i)
    if (std::abs(x(4 * n8 + i) - (1.0 + x(i))) > 1e-14) rep.translate_symmetric = false;

  const double sigma = mesh.sigma, beta = mesh.beta;
  rep.branch_continuity_ok = true;
  rep.layer_width_bound_ok = true;
  rep.dpsi_bound_ok = true;
  for (const auto& r : mesh.regions) {
    if (r.capped) rep.capped = true;
    if (r.kind != MeshRegion::Kind::graded) continue;
    const double scale = sigma * r.layer_scale / beta;
    const double transition = r.b - r.a;
    const double at_half = scale * mesh_phi(r.family, 0.5, N);
    // r.b - r.a cancels near x = 1, so compare on the scale of the endpoints
    if (std::abs(at_half - transition) > 1e-14 * std::max(transition, std::abs(r.b))) rep.branch_continuity_ok = false;

    const double dpsi = max_dpsi(r.family, N);
    rep.max_dpsi = std::max(rep.max_dpsi, dpsi);
    const double dpsi_bound = r.family == LayerFamily::shishkin ? 2.0 * std::log(double(N)) : 2.0;
    if (dpsi > dpsi_bound * (1 + 1e-14)) rep.dpsi_bound_ok = false;

    for (int c = r.first_cell; c < r.first_cell + r.cells; ++c) {
      const double far = std::max(std::abs(x(c) - r.anchor), std::abs(x(c + 1) - r.anchor));
      const double bound = 4.0 * scale / N * dpsi * std::exp(far / scale);
      const double ratio = (x(c + 1) - x(c)) / bound;
      rep.max_width_ratio = std::max(rep.max_width_ratio, ratio);
      if (ratio > 1.0 + 1e-12) rep.layer_width_bound_ok = false;
    }
  }
  return rep;
}

void write_nodes(const Mesh1D& mesh, std::ostream& out) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < mesh.nodes.size(); ++i) out << mesh.nodes(i) << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace spshift
