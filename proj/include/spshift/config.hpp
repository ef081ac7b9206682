#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spshift/greens.hpp"
#include "spshift/mesh.hpp"

namespace spshift {

/// Everything a command needs. Parsed from one JSON document; CLI flags override fields.
struct RunConfig {
  std::string example = "ex1";
  double epsilon = 1e-4;
  std::vector<double> epsilons;         // sweeps (greens, decompose); empty = command default
  std::optional<int> m;                 // boundary-condition order override
  std::vector<int> q{2};
  std::vector<int> N{64};
  LayerFamily bmesh = LayerFamily::bakhvalov_s;
  MeshFamily imesh = MeshFamily::bakhvalov_s;
  std::optional<double> sigma;          // default q+1 (q+2 for postprocess)
  std::optional<double> weak_exponent;
  std::optional<double> d;              // shift coefficient override; Green's runs default to 1
  std::string out;                      // empty = stdout
  std::optional<std::string> cache_dir;
  int q_ref = 5;
  int N_ref = 1024;
  int samples_per_cell = 4;
  GreensVariant variant = GreensVariant::m1;
  double b = 1.0, c = 1.0;              // Green's function coefficients
  std::uint64_t seed = 20240601;
  bool check = false;                   // exit 4 when a verification row misses its target

  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON document; unknown keys and bad values raise ValidationError naming the
/// field (and line/column for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Pretty JSON with every field; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Field-level checks (N divisible by 8, q >= 1, eps > 0, ...).
void validate(const RunConfig& config);

std::vector<double> parse_double_list(const std::string& text, const std::string& field);
std::vector<int> parse_int_list(const std::string& text, const std::string& field);

}  // namespace spshift
