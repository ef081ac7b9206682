#include "spshift/commands.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "spshift/asymptotics.hpp"
#include "spshift/errors.hpp"
#include "spshift/exceptions.hpp"
#include "spshift/fem.hpp"
#include "spshift/greens.hpp"
#include "spshift/mesh.hpp"

namespace spshift {

namespace {

constexpr double kGreensTolerance = 1e-2;

std::string header(const std::string& command, const RunConfig& c) {
  std::ostringstream os;
  os << "# spshift " << command << "\n";
  os << "# example=" << c.example << " epsilon=" << format_number(c.epsilon)
     << " m=" << (c.m ? std::to_string(*c.m) : std::string("default")) << " bmesh=" << to_string(c.bmesh)
     << " imesh=" << to_string(c.imesh) << " sigma=" << (c.sigma ? format_number(*c.sigma) : std::string("default"))
     << "\n";
  os << "# seed=" << c.seed << "\n";
  return os.str();
}

MeshParams mesh_params(const RunConfig& c, const ProblemSpec& spec, int q, int N, double sigma,
                       MeshFamily inner) {
  MeshParams mp;
  mp.N = N;
  mp.epsilon = spec.epsilon;
  mp.sigma = sigma;
  mp.beta = spec.beta;
  mp.q = q;
  mp.boundary = c.bmesh;
  mp.inner = inner;
  mp.weak_exponent = c.weak_exponent;
  return mp;
}

std::string rate(const std::vector<double>& col, std::size_t i) {
  if (i == 0) return "";
  return format_number(eoc(col[i - 1], col[i]));
}

std::string short_name(LayerFamily f) { return f == LayerFamily::bakhvalov_s ? "BS" : "S"; }
std::string short_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::bakhvalov_s: return "BS";
    case MeshFamily::shishkin: return "S";
    case MeshFamily::weak_equidistant: return "weakeq";
    case MeshFamily::weak_stype: return "weakS";
  }
  return "?";
}


void require_single(const RunConfig& c, const std::string& cmd) {
  if (c.q.size() != 1) throw ValidationError(cmd + ": config field 'q' must hold exactly one degree");
  if (c.N.size() != 1) throw ValidationError(cmd + ": config field 'N' must hold exactly one mesh size");
}

ReferenceSolution reference_for(const RunConfig& c, const ProblemSpec& spec) {
  std::optional<std::filesystem::path> dir;
  if (c.cache_dir) dir = *c.cache_dir;
  return compute_reference(spec, c.q_ref, c.N_ref, LayerFamily::bakhvalov_s, std::nullopt, dir);
}

struct GridRun {
  int q, N;
  ErrorReport report;
};

std::vector<GridRun> run_grid(const RunConfig& c, const ProblemSpec& spec, const ReferenceSolution& ref,
                              double sigma_shift, bool postprocess, MeshFamily inner) {
  std::vector<std::future<GridRun>> jobs;
  for (int q : c.q)
    for (int N : c.N)
      jobs.push_back(std::async(std::launch::async, [&, q, N] {
        const double sigma = c.sigma.value_or(q + sigma_shift);
        const Mesh1D mesh = build_mesh(mesh_params(c, spec, q, N, sigma, inner));
        const PairField sol = solve_problem(spec, mesh, q);
        return GridRun{q, N, error_report(spec, sol, ref, {postprocess, true})};
      }));
  std::vector<GridRun> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

ProblemSpec problem_from_config(const RunConfig& c, double epsilon) {
  ProblemSpec spec = make_named_problem(c.example, epsilon, c.m);
  if (c.d) {
    if (!spec.constants) throw ValidationError("config field 'd': override needs a constant-coefficient example");
    auto k = *spec.constants;
    k.d = *c.d;
    spec = make_constant_problem(spec.name, epsilon, spec.m, k);
  }
  return spec;
}

CommandOutput cmd_solve(const RunConfig& c) {
  validate(c);
  require_single(c, "solve");
  const int q = c.q.front(), N = c.N.front();
  const ProblemSpec spec = problem_from_config(c, c.epsilon);
  const Mesh1D mesh = build_mesh(mesh_params(c, spec, q, N, c.sigma.value_or(q + 1.0), c.imesh));
  SolveInfo info;
  const PairField sol = solve_problem(spec, mesh, q, &info);

  std::ostringstream os;
  os << header("solve", c) << "# q=" << q << " N=" << N << " residual=" << format_number(info.residual) << "\n";
  os << "x,u,du,w,dw\n";
  const auto& x = mesh.nodes;
  for (int i = 0; i < mesh.cells(); ++i)
    for (int s = 0; s < c.samples_per_cell + (i + 1 == mesh.cells() ? 1 : 0); ++s) {
      // left-cell convention at shared nodes keeps one value per x
      const double xs = s == c.samples_per_cell ? x(i + 1) : x(i) + (x(i + 1) - x(i)) * s / c.samples_per_cell;
      const auto v0 = eval_field(sol, xs, 0), v1 = eval_field(sol, xs, 1);
      os << format_number(xs) << ',' << format_number(v0.u) << ',' << format_number(v1.u) << ','
         << format_number(v0.w) << ',' << format_number(v1.w) << '\n';
    }
  return {os.str(), true};
}

CommandOutput cmd_convergence(const RunConfig& c) {
  validate(c);
  const ProblemSpec spec = problem_from_config(c, c.epsilon);
  const auto ref = reference_for(c, spec);
  const auto runs = run_grid(c, spec, ref, 1.0, false, c.imesh);

  std::ostringstream os;
  os << header("convergence", c) << "# reference q=" << c.q_ref << " N=" << c.N_ref
     << " residual=" << format_number(ref.residual) << "\n";
  os << "q,N,energy,energy_rate,l2_u,l2_u_rate,l2_w,l2_w_rate\n";
  std::size_t k = 0;
  for (std::size_t a = 0; a < c.q.size(); ++a) {
    std::vector<double> e, lu, lw;
    for (std::size_t b = 0; b < c.N.size(); ++b, ++k) {
      const auto& r = runs[k].report;
      e.push_back(r.energy_error);
      lu.push_back(r.l2_u);
      lw.push_back(r.l2_w);
      os << runs[k].q << ',' << runs[k].N << ',' << format_number(r.energy_error) << ',' << rate(e, b) << ','
         << format_number(r.l2_u) << ',' << rate(lu, b) << ',' << format_number(r.l2_w) << ',' << rate(lw, b) << '\n';
    }
  }
  return {os.str(), true};
}

CommandOutput cmd_compare_meshes(const RunConfig& c) {
  validate(c);
  if (c.q.size() != 1) throw ValidationError("compare-meshes: config field 'q' must hold exactly one degree");
  const ProblemSpec spec = problem_from_config(c, c.epsilon);
  const auto ref = reference_for(c, spec);
  const std::array inner{MeshFamily::bakhvalov_s, MeshFamily::shishkin, MeshFamily::weak_equidistant,
                         MeshFamily::weak_stype};
  std::vector<std::future<std::vector<GridRun>>> jobs;
  for (MeshFamily f : inner)
    jobs.push_back(std::async(std::launch::async, [&, f] { return run_grid(c, spec, ref, 1.0, false, f); }));
  std::vector<std::vector<double>> cols;
  for (auto& j : jobs) {
    std::vector<double> col;
    for (const auto& r : j.get()) col.push_back(r.report.energy_error);
    cols.push_back(std::move(col));
  }

  std::ostringstream os;
  os << header("compare-meshes", c) << "# q=" << c.q.front() << " energy errors\n";
  os << "N";
  for (MeshFamily f : inner) {
    const std::string name = short_name(c.bmesh) + "-" + short_name(f);
    os << ',' << name << ',' << name << "_rate";
  }
  os << '\n';
  for (std::size_t i = 0; i < c.N.size(); ++i) {
    os << c.N[i];
    for (const auto& col : cols) os << ',' << format_number(col[i]) << ',' << rate(col, i);
    os << '\n';
  }
  return {os.str(), true};
}

CommandOutput cmd_greens(const RunConfig& c) {
  validate(c);
  const std::vector<double> eps = c.epsilons.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : c.epsilons;
  const auto rows = greens_table(eps, c.variant, c.b, c.c, c.d.value_or(1.0));
  const double smallest = *std::min_element(eps.begin(), eps.end());

  std::ostringstream os;
  os << header("greens", c) << "# variant=" << (c.variant == GreensVariant::m1 ? "m1" : "m2")
     << " b=" << format_number(c.b) << " c=" << format_number(c.c) << " d=" << format_number(c.d.value_or(1.0))
     << "\n";
  os << "name,epsilon,computed,target,rel_error\n";
  bool passed = true;
  for (const auto& r : rows) {
    os << '"' << r.name << "\"," << format_number(r.epsilon) << ',' << format_number(r.computed) << ','
       << (r.has_target ? format_number(r.target) : "") << ',' << (r.has_target ? format_number(r.rel_error) : "")
       << '\n';
    if (r.has_target && r.epsilon == smallest && r.rel_error > kGreensTolerance) passed = false;
  }
  return {os.str(), passed};
}

CommandOutput cmd_decompose(const RunConfig& c) {
  validate(c);
  require_single(c, "decompose");
  const int q = c.q.front(), N = c.N.front();
  auto solve_at = [&](double eps) {
    const ProblemSpec spec = problem_from_config(c, eps);
    if (!spec.constants) throw ValidationError("decompose: needs a constant-coefficient problem");
    const Mesh1D mesh = build_mesh(mesh_params(c, spec, q, N, c.sigma.value_or(q + 1.0), c.imesh));
    return std::make_tuple(spec, solve_problem(spec, mesh, q), build_decomposition(spec));
  };

  std::ostringstream os;
  os << header("decompose", c) << "# q=" << q << " N=" << N << "\n";
  if (c.epsilons.size() > 1) {
    std::vector<std::future<std::vector<double>>> jobs;
    for (double eps : c.epsilons)
      jobs.push_back(std::async(std::launch::async, [&, eps] {
        const auto [spec, sol, dec] = solve_at(eps);
        return std::vector<double>{layer_pair_norm(spec, dec.e_left), layer_pair_norm(spec, dec.e_right),
                                   layer_pair_norm(spec, dec.w_left), layer_pair_norm(spec, dec.w_right),
                                   decomposition_compare(spec, sol, dec).max_difference};
      }));
    std::vector<std::vector<double>> cols(5);
    os << "epsilon,E_left,E_right,W_left,W_right,max_difference\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto v = jobs[i].get();
      os << format_number(c.epsilons[i]);
      for (std::size_t k = 0; k < v.size(); ++k) {
        os << ',' << format_number(v[k]);
        cols[k].push_back(v[k]);
      }
      os << '\n';
    }
    const char* names[] = {"E_left", "E_right", "W_left", "W_right"};
    for (int k = 0; k < 4; ++k) {
      if (*std::min_element(cols[k].begin(), cols[k].end()) > 0.0)
        os << "# slope " << names[k] << '=' << format_number(loglog_slope(c.epsilons, cols[k])) << '\n';
      else
        os << "# slope " << names[k] << "=zero component\n";
    }
    return {os.str(), true};
  }

  auto coarse = std::async(std::launch::async, [&] {
    const auto [spec, sol, dec] = solve_at(c.epsilon / 10);
    return decomposition_compare(spec, sol, dec);
  });
  const auto [spec, sol, dec] = solve_at(c.epsilon);
  const auto rep = decomposition_compare(spec, sol, dec);
  const auto fine = coarse.get();
  os << "# compare epsilon=" << format_number(c.epsilon) << " max_difference=" << format_number(rep.max_difference)
     << " inner_layer_location=" << format_number(rep.inner_layer_location) << "\n";
  os << "# compare epsilon=" << format_number(c.epsilon / 10) << " max_difference="
     << format_number(fine.max_difference) << "\n";
  os << "# compare ratio=" << format_number(rep.max_difference / fine.max_difference) << "\n";
  os << "x,S0,E,W,V0,u_h\n";
  std::vector<double> xs = layer_breakpoints(spec.epsilon);
  for (int i = 0; i <= 400; ++i) xs.push_back(i / 200.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const auto uf = sol.u_field();
  for (double x : xs)
    os << format_number(x) << ',' << format_number(dec.s0(x)) << ',' << format_number(dec.boundary_layers(x))
       << ',' << format_number(dec.inner_layers(x)) << ',' << format_number(dec.v0(x)) << ',' << format_number(uf(x))
       << '\n';
  return {os.str(), true};
}

CommandOutput cmd_postprocess(const RunConfig& c) {
  validate(c);
  const ProblemSpec spec = problem_from_config(c, c.epsilon);
  const auto ref = reference_for(c, spec);
  const auto runs = run_grid(c, spec, ref, 2.0, true, c.imesh);

  std::ostringstream os;
  os << header("postprocess", c) << "# sigma defaults to q+2\n";
  os << "q,N,energy,supercloseness,supercloseness_rate,postprocessed,postprocessed_rate\n";
  std::size_t k = 0;
  for (std::size_t a = 0; a < c.q.size(); ++a) {
    std::vector<double> sc, pp;
    for (std::size_t b = 0; b < c.N.size(); ++b, ++k) {
      const auto& r = runs[k].report;
      sc.push_back(r.supercloseness);
      pp.push_back(*r.postprocessed_energy);
      os << runs[k].q << ',' << runs[k].N << ',' << format_number(r.energy_error) << ','
         << format_number(r.supercloseness) << ',' << rate(sc, b) << ',' << format_number(pp.back()) << ','
         << rate(pp, b) << '\n';
    }
  }
  return {os.str(), true};
}

CommandOutput run_command(const std::string& name, const RunConfig& config) {
  if (name == "solve") return cmd_solve(config);
  if (name == "convergence") return cmd_convergence(config);
  if (name == "compare-meshes") return cmd_compare_meshes(config);
  if (name == "greens") return cmd_greens(config);
  if (name == "decompose") return cmd_decompose(config);
  if (name == "postprocess") return cmd_postprocess(config);
  throw ValidationError("unknown command \"" + name + "\"");
}

}  // namespace spshift
