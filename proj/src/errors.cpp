#include "spshift/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <Eigen/Dense>

#include "spshift/exceptions.hpp"
#include "spshift/interp.hpp"
#include "spshift/quadrature.hpp"

namespace spshift {

FieldPair as_fields(const PairField& p) { return {p.u_field(), p.w_field()}; }

double energy_from_parts(double l2_u, double l2_du, double l2_w, double beta, double delta) {
  return std::sqrt(l2_w * l2_w + 0.5 * beta * beta * l2_du * l2_du + delta * l2_u * l2_u);
}

namespace {

std::vector<double> union_nodes(std::initializer_list<const Eigen::VectorXd*> meshes) {
  std::vector<double> all;
  for (const auto* m : meshes) all.insert(all.end(), m->data(), m->data() + m->size());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all)
    if (out.empty() || v - out.back() > 1e-15 * std::max(1.0, std::abs(v))) out.push_back(v);
  return out;
}

NormParts accumulate(const FieldPair& a, const FieldPair* b, double beta, double delta) {
  std::vector<double> nodes = b ? union_nodes({&a.u.nodes(), &a.w.nodes(), &b->u.nodes(), &b->w.nodes()})
                                : union_nodes({&a.u.nodes(), &a.w.nodes()});
  int degree = std::max(a.u.degree(), a.w.degree());
  if (b) degree = std::max({degree, b->u.degree(), b->w.degree()});
  const auto rule = gauss_legendre<double>(degree + 3);
  double su = 0, sdu = 0, sw = 0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double lo = nodes[i], h = nodes[i + 1] - lo, mid = lo + h / 2;
    const int au = a.u.locate(mid), aw = a.w.locate(mid);
    const int bu = b ? b->u.locate(mid) : 0, bw = b ? b->w.locate(mid) : 0;
    for (Eigen::Index g = 0; g < rule.points.size(); ++g) {
      const double x = lo + h * rule.points(g), wt = rule.weights(g) * h;
      double u = a.u.eval_in_cell(au, x, 0), du = a.u.eval_in_cell(au, x, 1), w = a.w.eval_in_cell(aw, x, 0);
      if (b) {
        u -= b->u.eval_in_cell(bu, x, 0);
        du -= b->u.eval_in_cell(bu, x, 1);
        w -= b->w.eval_in_cell(bw, x, 0);
      }
      su += wt * u * u;
      sdu += wt * du * du;
      sw += wt * w * w;
    }
  }
  NormParts p{std::sqrt(su), std::sqrt(sdu), std::sqrt(sw), 0.0};
  p.energy = energy_from_parts(p.l2_u, p.l2_du, p.l2_w, beta, delta);
  return p;
}

std::mutex cache_mutex;

std::string format17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

NormParts distance(const FieldPair& a, const FieldPair& b, double beta, double delta) {
  return accumulate(a, &b, beta, delta);
}

NormParts norms(const FieldPair& a, double beta, double delta) { return accumulate(a, nullptr, beta, delta); }

double energy_norm(const ProblemSpec& spec, const PairField& p) {
  return norms(as_fields(p), spec.beta, spec.delta).energy;
}

double energy_distance(const ProblemSpec& spec, const PairField& a, const PairField& b) {
  return distance(as_fields(a), as_fields(b), spec.beta, spec.delta).energy;
}

NormParts norms_of(const PairFunctionU& u, const ScalarFunction& w, double beta, double delta,
                   std::span<const double> breakpoints, int order, int panels) {
  std::vector<double> bp(breakpoints.begin(), breakpoints.end());
  bp.push_back(0.0);
  bp.push_back(2.0);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  const auto rule = gauss_legendre<double>(order);
  double su = 0, sdu = 0, sw = 0;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    const double len = (bp[i + 1] - bp[i]) / panels;
    for (int p = 0; p < panels; ++p)
      for (Eigen::Index g = 0; g < rule.points.size(); ++g) {
        const double x = bp[i] + len * (p + rule.points(g)), wt = rule.weights(g) * len;
        const double uv = u(x, 0), du = u(x, 1), wv = w(x);
        su += wt * uv * uv;
        sdu += wt * du * du;
        sw += wt * wv * wv;
      }
  }
  NormParts r{std::sqrt(su), std::sqrt(sdu), std::sqrt(sw), 0.0};
  r.energy = energy_from_parts(r.l2_u, r.l2_du, r.l2_w, beta, delta);
  return r;
}

std::string ReferenceKey::filename() const {
  std::ostringstream os;
  os << example << "_eps" << std::scientific << std::setprecision(6) << epsilon << "_m" << m << "_q" << q_ref << "_N"
     << N_ref << '_' << to_string(family) << "_sigma" << std::defaultfloat << sigma << ".txt";
  return os.str();
}

void write_reference(const ReferenceSolution& ref, const std::filesystem::path& file) {
  const auto& k = ref.key;
  const auto& nodes = ref.field.space->mesh().nodes;
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write reference cache " + tmp);
    out << "# spshift reference solution\n";
    out << "example " << k.example << '\n'
        << "epsilon " << format17(k.epsilon) << '\n'
        << "m " << k.m << '\n'
        << "q_ref " << k.q_ref << '\n'
        << "N_ref " << k.N_ref << '\n'
        << "family " << to_string(k.family) << '\n'
        << "sigma " << format17(k.sigma) << '\n'
        << "residual " << format17(ref.residual) << '\n';
    out << std::setprecision(17);
    out << "nodes " << nodes.size() << '\n';
    for (Eigen::Index i = 0; i < nodes.size(); ++i) out << nodes(i) << '\n';
    out << "u " << ref.field.u.size() << '\n';
    for (Eigen::Index i = 0; i < ref.field.u.size(); ++i) out << ref.field.u(i) << '\n';
    out << "w " << ref.field.w.size() << '\n';
    for (Eigen::Index i = 0; i < ref.field.w.size(); ++i) out << ref.field.w(i) << '\n';
  }
  std::filesystem::rename(tmp, file);
}

std::optional<ReferenceSolution> read_reference(const std::filesystem::path& file, const ReferenceKey& key,
                                               double beta) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string line, tag;
  std::getline(in, line);
  ReferenceKey k;
  std::string family;
  double residual = 0.0;
  in >> tag >> k.example >> tag >> k.epsilon >> tag >> k.m >> tag >> k.q_ref >> tag >> k.N_ref >> tag >> family >>
      tag >> k.sigma >> tag >> residual;
  if (!in) return std::nullopt;
  k.family = layer_family_from_string(family);
  if (!(k == key)) return std::nullopt;
  auto read_vec = [&](const char* name) -> std::optional<Eigen::VectorXd> {
    Eigen::Index n = 0;
    if (!(in >> tag >> n) || tag != name) return std::nullopt;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) in >> v(i);
    if (!in) return std::nullopt;
    return v;
  };
  const auto nodes = read_vec("nodes");
  const auto u = read_vec("u");
  const auto w = read_vec("w");
  if (!nodes || !u || !w) return std::nullopt;
  Mesh1D mesh = build_stype(k.N_ref, k.epsilon, k.sigma, beta, k.family);
  if (mesh.nodes.size() != nodes->size() || mesh.nodes != *nodes) return std::nullopt;
  auto space = make_space(std::move(mesh), k.q_ref, k.m);
  if (u->size() != space->component_size() || w->size() != space->component_size()) return std::nullopt;
  return ReferenceSolution{PairField{space, *u, *w}, k, residual};
}

ReferenceSolution compute_reference(const ProblemSpec& spec, int q_ref, int N_ref, LayerFamily family,
                                    std::optional<double> sigma, const std::optional<std::filesystem::path>& cache_dir) {
  ReferenceKey key{spec.name, spec.epsilon, spec.m, q_ref, N_ref, family, sigma ? *sigma : q_ref + 1.0};
  std::filesystem::path file;
  if (cache_dir) {
    file = *cache_dir / key.filename();
    std::lock_guard lock(cache_mutex);
    if (auto cached = read_reference(file, key, spec.beta)) return std::move(*cached);
  }
  Mesh1D mesh = build_stype(N_ref, spec.epsilon, key.sigma, spec.beta, family);
  SolveInfo info;
  PairField field = solve_problem(spec, mesh, q_ref, &info);
  ReferenceSolution ref{std::move(field), key, info.residual};
  if (cache_dir) {
    std::lock_guard lock(cache_mutex);
    std::filesystem::create_directories(*cache_dir);
    write_reference(ref, file);
  }
  return ref;
}

ErrorReport error_report(const ProblemSpec& spec, const PairField& solution, const ReferenceSolution& reference,
                         const ErrorOptions& options) {
  const auto& sp = *solution.space;
  const auto& rp = *reference.field.space;
  if (options.check_domination && (rp.cells() < 4 * sp.cells() || rp.q() < sp.q() + 1))
    throw ValidationError("reference does not dominate the run: need N_ref >= 4N and q_ref >= q+1");
  if (sp.m() != rp.m() || spec.m != sp.m()) throw ValidationError("reference and solution use different m");

  const FieldPair ref = as_fields(reference.field);
  const FieldPair sol = as_fields(solution);
  const NormParts err = distance(ref, sol, spec.beta, spec.delta);
  const PairField iref = interpolate_field(reference.field, solution.space);
  const FieldPair ifld = as_fields(iref);

  ErrorReport r;
  r.energy_error = err.energy;
  r.l2_u = err.l2_u;
  r.l2_w = err.l2_w;
  r.supercloseness = distance(ifld, sol, spec.beta, spec.delta).energy;
  r.interpolation_error = distance(ref, ifld, spec.beta, spec.delta).energy;
  if (options.postprocess) {
    const auto pp = postprocess(solution);
    r.postprocessed_energy = distance(ref, FieldPair{pp.u, pp.w}, spec.beta, spec.delta).energy;
  }
  const auto& mesh = sp.mesh();
  r.example = spec.name;
  r.epsilon = spec.epsilon;
  r.N = sp.cells();
  r.q = sp.q();
  r.m = sp.m();
  r.sigma = mesh.sigma;
  r.boundary_family = to_string(mesh.boundary_family);
  r.inner_family = to_string(mesh.family);
  return r;
}

double eoc(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw ValidationError("eoc: errors must be positive");
  return std::log2(e_coarse / e_fine);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need two or more matching points");
  Eigen::MatrixXd A(x.size(), 2);
  Eigen::VectorXd r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("loglog_slope: values must be positive");
    A(i, 0) = std::log(x[i]);
    A(i, 1) = 1.0;
    r(i) = std::log(y[i]);
  }
  return A.colPivHouseholderQr().solve(r)(0);
}

}  // namespace spshift
