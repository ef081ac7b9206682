#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "spshift/fem.hpp"
#include "spshift/field.hpp"
#include "spshift/mesh.hpp"
#include "spshift/problem.hpp"

namespace spshift {

/// A (u, w) pair of piecewise polynomials; the two components may sit on any meshes.
struct FieldPair {
  PiecewisePolynomial u, w;
};

FieldPair as_fields(const PairField& p);

struct NormParts {
  double l2_u = 0.0;   // ||u||
  double l2_du = 0.0;  // ||u'||
  double l2_w = 0.0;   // ||w||
  double energy = 0.0;
};

/// sqrt(||w||^2 + beta^2/2 ||u'||^2 + delta ||u||^2)
double energy_from_parts(double l2_u, double l2_du, double l2_w, double beta, double delta);

/// Norms of a - b, integrated on the union of all four meshes with Gauss order max degree + 3.
NormParts distance(const FieldPair& a, const FieldPair& b, double beta, double delta);
NormParts norms(const FieldPair& a, double beta, double delta);

double energy_norm(const ProblemSpec& spec, const PairField& p);
double energy_distance(const ProblemSpec& spec, const PairField& a, const PairField& b);

/// u(x, k) gives u^(k) for k in {0,1}; w(x) gives w.
using PairFunctionU = std::function<double(double, int)>;

/// Norms of a pair of callables, composite Gauss on [0,2] split at the breakpoints
/// (each piece further cut into `panels` equal panels).
NormParts norms_of(const PairFunctionU& u, const ScalarFunction& w, double beta, double delta,
                   std::span<const double> breakpoints, int order = 10, int panels = 4);

struct ReferenceKey {
  std::string example;
  double epsilon = 0.0;
  int m = 1;
  int q_ref = 5;
  int N_ref = 1024;
  LayerFamily family = LayerFamily::bakhvalov_s;
  double sigma = 6.0;

  std::string filename() const;
  bool operator==(const ReferenceKey&) const = default;
};

struct ReferenceSolution {
  PairField field;
  ReferenceKey key;
  double residual = 0.0;
};

inline constexpr int kReferenceDegree = 5;
inline constexpr int kReferenceCells = 1024;

/// Fine solve on an S-type mesh of one family (sigma defaults to q_ref + 1), cached under
/// cache_dir when given. Cache files hold a metadata header and 17-digit coefficients.
ReferenceSolution compute_reference(const ProblemSpec& spec, int q_ref = kReferenceDegree,
                                    int N_ref = kReferenceCells, LayerFamily family = LayerFamily::bakhvalov_s,
                                    std::optional<double> sigma = std::nullopt,
                                    const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

void write_reference(const ReferenceSolution& ref, const std::filesystem::path& file);
/// Reads a cache file; nullopt when missing, when its header does not match the key or when
/// the stored nodes differ from the mesh the key (with this beta) generates.
std::optional<ReferenceSolution> read_reference(const std::filesystem::path& file, const ReferenceKey& key,
                                                double beta = 1.0);

struct ErrorReport {
  double energy_error = 0.0;
  double l2_u = 0.0;
  double l2_w = 0.0;
  double supercloseness = 0.0;
  double interpolation_error = 0.0;  // |||(u_ref - I1 u_ref, w_ref - I2 w_ref)|||
  std::optional<double> postprocessed_energy;

  std::string example;
  double epsilon = 0.0;
  int N = 0, q = 0, m = 1;
  double sigma = 0.0;
  std::string boundary_family, inner_family;
};

struct ErrorOptions {
  bool postprocess = false;
  bool check_domination = true;
};

/// Errors of a discrete solution against a dominating reference (N_ref >= 4N, q_ref >= q+1).
ErrorReport error_report(const ProblemSpec& spec, const PairField& solution, const ReferenceSolution& reference,
                         const ErrorOptions& options = {});

/// log2(e_coarse / e_fine)
double eoc(double e_coarse, double e_fine);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spshift
