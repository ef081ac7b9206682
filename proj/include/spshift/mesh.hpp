#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spshift {

/// Mesh-generating function families for S-type graded regions.
enum class LayerFamily { shishkin, bakhvalov_s };

/// How the region around the inner layer at x = 1 is meshed.
enum class MeshFamily { shishkin, bakhvalov_s, weak_equidistant, weak_stype };

std::string to_string(LayerFamily f);
std::string to_string(MeshFamily f);
LayerFamily layer_family_from_string(const std::string& s);
MeshFamily mesh_family_from_string(const std::string& s);

/// Mesh-generating function phi(t) on [0,1/2] with phi(0) = 0, phi(1/2) = ln N.
template <class Scalar>
Scalar mesh_phi(LayerFamily family, Scalar t, int N) {
  if (family == LayerFamily::shishkin) return 2 * t * std::log(Scalar(N));
  return -std::log(1 - 2 * t * (1 - Scalar(1) / N));
}

/// psi = exp(-phi) and its derivative.
template <class Scalar>
Scalar mesh_psi(LayerFamily family, Scalar t, int N) {
  return std::exp(-mesh_phi(family, t, N));
}
template <class Scalar>
Scalar mesh_dpsi(LayerFamily family, Scalar t, int N) {
  if (family == LayerFamily::shishkin) return -2 * std::log(Scalar(N)) * std::pow(Scalar(N), -2 * t);
  return -2 * (1 - Scalar(1) / N);
}

/// lambda = min(sigma eps ln N / beta, 1/4)
double transition_lambda(double epsilon, double sigma, double beta, int N);

/// Scale of the weak inner layer, eps^(1 - 5/(2(q+1))) unless an exponent override is given.
double weak_layer_scale(int q, double epsilon, std::optional<double> exponent = std::nullopt);

/// mu = 1/4 for q <= 2, else min(eps^(1-5/(2(q+1)))/beta, 1/4). With an exponent override
/// the q <= 2 rule is dropped and mu = min(eps^exponent / beta, 1/4) for every q.
double transition_mu(int q, double epsilon, double beta, std::optional<double> exponent = std::nullopt);

/// nu = min(sigma/beta * eps^(1-5/(2(q+1))) ln N, 1/4)
double transition_nu(int q, double epsilon, double sigma, double beta, int N,
                     std::optional<double> exponent = std::nullopt);

/// One contiguous block of cells built by a single rule.
struct MeshRegion {
  enum class Kind { graded, uniform };
  Kind kind = Kind::uniform;
  int first_cell = 0;
  int cells = 0;
  double a = 0.0, b = 0.0;
  // graded regions only: x = anchor + direction * scale * phi(4 i / N)
  LayerFamily family = LayerFamily::bakhvalov_s;
  double anchor = 0.0;
  int direction = 1;
  double layer_scale = 0.0;   // eps (boundary) or the weak-layer scale
  bool capped = false;        // transition hit 1/4; region is uniform
};

struct Mesh1D {
  Eigen::VectorXd nodes;
  MeshFamily family = MeshFamily::bakhvalov_s;
  LayerFamily boundary_family = LayerFamily::bakhvalov_s;
  LayerFamily inner_grading = LayerFamily::bakhvalov_s;
  double epsilon = 0.0;
  double beta = 1.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double inner_transition = 0.0;  // lambda, mu or nu
  int q_hint = 1;
  std::vector<MeshRegion> regions;

  int cells() const { return static_cast<int>(nodes.size()) - 1; }
  double width(int cell) const { return nodes(cell + 1) - nodes(cell); }
  bool lambda_capped() const;
  bool inner_capped() const;
};

/// All inputs of the general mesh builder.
struct MeshParams {
  int N = 64;
  double epsilon = 1e-4;
  double sigma = 2.0;
  double beta = 1.0;
  int q = 1;
  LayerFamily boundary = LayerFamily::bakhvalov_s;
  MeshFamily inner = MeshFamily::bakhvalov_s;
  LayerFamily weak_grading = LayerFamily::shishkin;  // grading inside the weak S-type region
  std::optional<double> weak_exponent;
};

/// S-type mesh with one family everywhere; x_i = 1 + x_{i-N/2} on (1,2).
Mesh1D build_stype(int N, double epsilon, double sigma, double beta, LayerFamily family);

/// S-type boundary regions, equidistant N/4-cell meshes on (lambda,1-mu), (1-mu,1+mu), (1+mu,2-lambda).
Mesh1D build_weak_equidistant(int N, double epsilon, double sigma, double beta, int q,
                              LayerFamily boundary, std::optional<double> weak_exponent = std::nullopt);

/// S-type layout with nu in place of lambda around x = 1.
Mesh1D build_weak_stype(int N, double epsilon, double sigma, double beta, int q, LayerFamily boundary,
                        LayerFamily grading = LayerFamily::shishkin,
                        std::optional<double> weak_exponent = std::nullopt);

/// N equal cells on [0,2]; used for reduced problems without layers.
Mesh1D build_uniform(int N);

/// General builder: boundary family near 0 and 2, any inner treatment near 1.
Mesh1D build_mesh(const MeshParams& params);

struct MeshReport {
  double h_min = 0.0, h_max = 0.0;
  std::vector<int> region_cells;
  bool divisible_by_8 = false;
  bool strictly_increasing = false;
  bool endpoints_exact = false;
  bool anchors_ok = false;             // x_{N/8} = lambda, x_{3N/8} = 1 - inner, x_{N/2} = 1
  bool branch_continuity_ok = false;   // graded formula at t = 1/2 meets the transition point
  bool translate_symmetric = false;    // x_i = 1 + x_{i-N/2}
  bool layer_width_bound_ok = false;   // h_i <= C eps/N max|psi'| exp(beta x/(sigma eps))
  bool dpsi_bound_ok = false;          // max|psi'| <= 2 ln N (Shishkin), <= 2 (Bakhvalov-S)
  double max_dpsi = 0.0;
  double max_width_ratio = 0.0;        // largest h_i / bound over graded cells
  bool capped = false;

  bool all_ok() const {
    return divisible_by_8 && strictly_increasing && endpoints_exact && anchors_ok && branch_continuity_ok &&
           layer_width_bound_ok && dpsi_bound_ok;
  }
};

MeshReport mesh_diagnostics(const Mesh1D& mesh);

/// Numerical max of |psi'| over [0,1/2].
double max_dpsi(LayerFamily family, int N, int samples = 2001);

/// One node per line, 17 significant digits.
void write_nodes(const Mesh1D& mesh, std::ostream& out);

}  // namespace spshift
