// Command-line runner: spshift <command> [flags]
#include <fstream>
#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "spshift/commands.hpp"
#include "spshift/config.hpp"
#include "spshift/exceptions.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kSolver = 3, kAcceptance = 4 };

struct Flags {
  std::string config, example, epsilon, q, N, bmesh, imesh, out;
  std::optional<double> sigma;
  bool check = false, dump_config = false;
};

spshift::RunConfig resolve(const Flags& f) {
  using namespace spshift;
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.example.empty()) c.example = f.example;
  if (!f.epsilon.empty()) {
    c.epsilons = parse_double_list(f.epsilon, "epsilon");
    c.epsilon = c.epsilons.front();
  }
  if (!f.q.empty()) c.q = parse_int_list(f.q, "q");
  if (!f.N.empty()) c.N = parse_int_list(f.N, "N");
  if (!f.bmesh.empty()) c.bmesh = layer_family_from_string(f.bmesh);
  if (!f.imesh.empty()) c.imesh = mesh_family_from_string(f.imesh);
  if (f.sigma) c.sigma = f.sigma;
  if (!f.out.empty()) c.out = f.out;
  if (f.check) c.check = true;
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed FEM solver for a singularly perturbed fourth-order problem with a shift"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "solve once and print u, u', w, w' at the mesh points"},
      {"convergence", "error table against a fine reference, with EOCs"},
      {"compare-meshes", "energy errors for the four inner-layer mesh treatments"},
      {"greens", "Green's function moments and det(A) against their limits"},
      {"decompose", "leading-order layer decomposition, or norm slopes for an eps list"},
      {"postprocess", "supercloseness and recovered-solution errors"},
  };
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--example", flags.example, "ex1 or ex2");
    sub->add_option("--epsilon", flags.epsilon, "perturbation parameter; a comma list sweeps");
    sub->add_option("--q", flags.q, "polynomial degrees, comma separated");
    sub->add_option("--N", flags.N, "mesh sizes, comma separated multiples of 8");
    sub->add_option("--bmesh", flags.bmesh, "boundary layer family (shishkin, bakhvalov_s)");
    sub->add_option("--imesh", flags.imesh, "inner layer family (shishkin, bakhvalov_s, weak_equidistant, weak_stype)");
    sub->add_option("--sigma", flags.sigma, "mesh parameter, default q+1");
    sub->add_option("--out", flags.out, "output CSV file (default stdout)");
    sub->add_flag("--check", flags.check, "exit 4 when a verification row misses its target");
    sub->add_flag("--dump-config", flags.dump_config, "print the resolved configuration as JSON and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const spshift::RunConfig config = resolve(flags);
    if (flags.dump_config) {
      std::cout << spshift::emit_config(config);
      return kOk;
    }
    const auto result = spshift::run_command(command, config);
    if (config.out.empty()) {
      std::cout << result.csv;
    } else {
      std::ofstream out(config.out);
      if (!out) throw spshift::ValidationError("cannot open output file " + config.out);
      out << result.csv;
    }
    if (config.check && !result.passed) {
      std::cerr << "spshift: verification rows missed their targets\n";
      return kAcceptance;
    }
    return kOk;
  } catch (const spshift::ValidationError& e) {
    std::cerr << "spshift: " << e.what() << '\n';
    return kValidation;
  } catch (const spshift::SolverError& e) {
    std::cerr << "spshift: solver failure: " << e.what() << '\n';
    return kSolver;
  }
}
