#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "laplab/models.hpp"

namespace laplab {

// A polar sampling of the open disk: every (radius, angle) pair is one grid
// point z = radius * exp(i * angle).
struct ScanGrid {
  std::vector<double> radii;   // strictly increasing, in (0, 1)
  std::vector<double> angles;  // in [0, 2*pi)
};

// Throws std::invalid_argument when the grid violates its invariants.
void validate_grid(const ScanGrid& grid);

ScanGrid full_circle_grid(std::vector<double> radii, int angular_points);
ScanGrid arc_grid(std::vector<double> radii, const Arc& arc, int angular_points);

struct ScanPoint {
  Complex z;
  double radius = 0.0;
  double angle = 0.0;
  double weighted_norm = 0.0;
  double unweighted_norm = 0.0;
  std::optional<double> localized_norm;
  bool solver_ok = true;
  std::string note;  // per-point solver diagnostics, never fatal
};

struct ScanResult {
  double s = 0.0;
  std::vector<double> radii;           // grid radii, aligned with per_radius_max
  std::vector<ScanPoint> points;       // grid order: radius-major, angle-minor
  std::vector<double> per_radius_max;  // max of the verdict norm at each radius
  double sup = 0.0;                    // max of the verdict norm over the grid
  double divergence_ratio = 1.0;       // outermost max / innermost max
  double stabilization_ratio = 1.0;    // outermost max / second-outermost max
  bool bounded = true;                 // stabilization_ratio <= threshold
};

// F_s(z) = <A>^-s (1 - zV*)^-1 <A>^-s by dense column solve.
struct WeightedResolvent {
  TruncatedOperator F;
  double norm = 0.0;       // ||F_s(z)||
  double residual = 0.0;   // ||(1 - zV*) X - <A>^-s|| for the solved block X
  double condition = 0.0;  // ||1 - zV*|| * ||(1 - zV*)^-1||
};
WeightedResolvent weighted_resolvent(const TruncatedOperator& v,
                                     const TruncatedOperator& a, double s,
                                     Complex z);

// (1 - z V*)^-1.  For |z| >= 1 the solve is attempted after checking that no
// eigenvalue of V* sits at 1/z; a near-singular system throws.
Matrix bare_resolvent(const Matrix& v, Complex z);

// Weighted scan over the grid.  The verdict norm is the weighted norm; the
// estimate is declared bounded when the outermost per-radius max exceeds the
// second-outermost by at most the stabilization threshold.
ScanResult lap_scan(const Model& m, double s, const ScanGrid& grid,
                    double stabilization_threshold = 1.5);

// Same scan with the spectral localizer Phi(U) inserted on both sides; the
// verdict norm is the localized norm.  phi maps an angle to a real value.
ScanResult localized_scan(const Model& m, double s,
                          const std::function<double(double)>& phi,
                          const ScanGrid& grid,
                          double stabilization_threshold = 1.5);

// Randomized verification of ||(U* - V*) G_0(z) psi||^2 <= 8 <psi, Re G_0 psi>.
struct CutoffBoundReport {
  double max_violation = 0.0;  // max over samples of LHS - RHS
  int samples = 0;
  bool ok = false;  // max_violation <= 1e-9
};
CutoffBoundReport dilation_cutoff_bound(const Model& m,
                                        const std::vector<Complex>& zs,
                                        int vectors_per_z = 50,
                                        std::uint64_t seed = 1);

// P_z(V) = 2 Re (1 - zV*)^-1 - 1, which factors as G (1 - |z|^2 V*V) G*.
struct PzReport {
  double min_eig = 0.0;
  double factor_residual = 0.0;
};
PzReport pz_positivity(const TruncatedOperator& v, Complex z);

// G_eps(z) = (1 - z V_eps*)^-1 on the admissible region d(eps, z) > 0 with
// d(eps, z) = 1 - |z|^2 + a0 eps |z|^2.
double admissibility(double a0, double eps, Complex z);

struct DeformedDiagnostics {
  double d = 0.0;
  double g_norm = 0.0;
  double dg_norm = 0.0;    // d(eps, z) * ||G_eps(z)||
  double residual = 0.0;   // solve residual
  double mmt_slack = 0.0;  // min-eig(1 - |z|^2 V_eps V_eps*) - d
};
struct DeformedResolvent {
  Matrix G;
  FamilySnapshot snapshot;
  DeformedDiagnostics diag;
};
DeformedResolvent deformed_resolvent(const RegularizedFamily& fam, Complex z,
                                     double eps, double a0);

// Local form of the quadratic-form bound: the guard-trimmed compression of
//   1 - |z|^2 V_eps V_eps* + (3 pi^2 a1 / 2 d0^2) eps |z| T_eps* T_eps - d
// should be nearly positive for models whose positivity is only local.
double mmt0_slack(const Model& m, Complex z, double eps, double a0, double a1,
                  double d0, int guard = 4);

struct DeformationPoint {
  double eps = 0.0;
  Complex z;
  double g_norm = 0.0;
  double d_value = 0.0;
  double dg_norm = 0.0;
  double f_eps_norm = 0.0;  // ||F_{s,eps}(z)||
  double f_diff = 0.0;      // ||F_{s,eps}(z) - F_s(z)||
  double fd_norm = 0.0;     // centered difference ||d/deps F_{s,eps}(z)||
  double h_bound = 0.0;     // h1 sqrt(||F_{s,eps}||) + h2 ||F_{s,eps}||
  double form_slack = 0.0;  // worst sampled-vector slack of the h1/h2 bound
};

struct ConvergenceOptions {
  std::vector<double> epsilons = {0.2, 0.1, 0.05, 0.025};
  int angular_points = 16;
  std::optional<Arc> angles;        // default: full circle
  double decrease_threshold = 0.05; // target for final sup / initial sup
  Complex interior_z = Complex(0.5, 0.0);
  int form_vectors = 8;             // sample vectors for the h1/h2 form bound
  std::uint64_t seed = 1;
  int c0_radial = 6;                // admissible-region sampling for C0
  int c0_angular = 8;
};

struct DeformationTrace {
  double s = 0.0;
  double r = 0.0;
  double a0 = 0.0;
  double b = 0.0;   // ||ad_A V|| carried by the family
  double c0 = 0.0;  // measured sup of d(eps,z) ||G_eps(z)||
  std::vector<double> epsilons;
  std::vector<double> sup_diff;  // per eps: sup_angles ||F_{s,eps} - F_s||
  std::vector<DeformationPoint> points;
  bool decreasing = true;
  bool warn_nonmonotone = false;
  double final_over_initial = 0.0;
  double interior_bound_worst = 0.0;  // max of ||G_eps - G_0|| / theory bound
};

DeformationTrace convergence_study(const RegularizedFamily& fam,
                                   const Matrix& a_op, double s, double r,
                                   double a0,
                                   const ConvergenceOptions& opts = {});

}  // namespace laplab
