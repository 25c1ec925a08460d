#pragma once

#include "laplab/models.hpp"

namespace laplab {

// ---------------------------------------------------------------------------
// propagation estimate over an arc
// ---------------------------------------------------------------------------

struct MourreReport {
  Arc arc;
  double a = 0.0;           // threshold tested
  double min_eig = 0.0;     // compression of U*AU - A to the spectral subspace
  double min_eig_alt = 0.0; // compression of A - UAU* (both orders circulate)
  int dim_ranE = 0;
  bool vacuous = false;     // Ran E = {0}
  bool strict = false;      // min_eig >= a - 1e-10 (vacuously when rank 0)
  double d0 = 0.0;          // gap to the complement of an enclosing arc, 0 if unused
};

// Model version: the commutators are evaluated interior so that truncation
// rows do not pollute the compression.  outer, when given, only fills d0.
MourreReport mourre_check(const Model& m, const Arc& arc, double a,
                          const std::optional<Arc>& outer = std::nullopt);

// Raw matrix version for synthetic fixtures; no interior clean-up.
MourreReport mourre_check(const Matrix& u, const Matrix& a_op, const Arc& arc,
                          double a);

TruncatedOperator spectral_projection(const TruncatedOperator& u, const Arc& arc,
                                      double tol = 1e-10);

// ---------------------------------------------------------------------------
// global commutator positivity
// ---------------------------------------------------------------------------

struct GlobalPositivityReport {
  double a0 = 0.0;      // min eig of the interior Re(V* ad(A, V))
  double b = 0.0;       // norm of the interior ad(A, V)
  bool holds = false;   // a0 above the floor
  double floor = 0.0;
};

GlobalPositivityReport global_positivity(const Model& m, double floor = 1e-8);
double global_positivity(const Matrix& v, const Matrix& a_op);  // raw fixture form

// ---------------------------------------------------------------------------
// weak commutator smallness and the quadratic contraction-defect inequality
// ---------------------------------------------------------------------------

struct H4Entry {
  std::string name;        // which product was tested: "UV*" or "U*V"
  double m = 0.0;          // norm of the interior i ad(A, Im W)
  double alpha_max = 0.0;  // largest alpha in [0, 4] keeping the form positive
  bool pass = false;       // m < a and alpha_max > 0
};

struct H4Report {
  double a = 0.0;  // threshold for the commutator norms
  std::vector<H4Entry> entries;
  bool holds = false;
};

H4Report h4_check(const Model& m, double a);

// Largest alpha in [0, 4] with 2 Re(1 - W) - (1 + alpha)|1 - W|^2 >= -1e-10,
// located by bisection to 1e-6.
double alpha_max_for(const Matrix& w);

// ---------------------------------------------------------------------------
// rigidity of boundary eigenvectors
// ---------------------------------------------------------------------------

struct VirialPair {
  Complex lambda;
  double res_U = 0.0;  // ||U psi - lambda psi||
  double res_P = 0.0;  // ||P psi - psi||
  double res_Q = 0.0;  // ||Q psi - psi||
};

struct VirialReport {
  double tol = 0.0;
  std::vector<VirialPair> pairs;
  double worst_residual = 0.0;  // 0 when no boundary eigenvalues exist
};

VirialReport virial_check(const Model& m, double tol = 1e-6);

// ---------------------------------------------------------------------------
// equivalence of the projected and global forms of the estimate
// ---------------------------------------------------------------------------

struct MourreEquivalence {
  double a = 0.0;
  double b = 0.0;
  double compression_min_eig = 0.0;  // min eig of EBE on Ran E
  double certificate_min_eig = 0.0;  // min eig of B - aE + bEperp
  bool ok = false;
};

// From EBE >= cE on Ran E produce (a, b) = (c/2, ||B||(1 + 2||B||/c)) and
// certify B >= aE - bEperp.  Throws "form (a) fails" when the premise does
// not hold within 1e-10.
MourreEquivalence mourre_equiv(const Matrix& b_op, const Matrix& e_proj,
                               double c);

// ---------------------------------------------------------------------------
// local lower bounds near an arc
// ---------------------------------------------------------------------------

struct LocalBoundOptions {
  std::vector<double> a1_grid;          // empty: {0} followed by a log grid
  std::vector<double> epsilons = {0.0, 0.1};
  int radial_points = 10;
  int angular_points = 10;
  double r_min = 0.5;
  double r_max = 1.0;
  double feasibility_floor = 1e-8;
};

struct LocalBoundsReport {
  double identity_residual_R = 0.0;  // 2Re(V ad_A V*) expansion, R = U V*
  double identity_residual_L = 0.0;  // mirrored expansion, R' = U* V
  double a0 = 0.0;
  double a1 = 0.0;
  std::vector<std::pair<double, double>> a1_curve;  // (a1, best a0)
  bool feasible = false;
  double b = 0.0;        // norm of the interior ad(A, V)
  double d0 = 0.0;       // arc gap fed into the edge-projection bound
  double eperp_worst = 0.0;  // worst min eig of (bound RHS) - Eperp
};

// inner must sit strictly inside outer.
LocalBoundsReport local_lower_bounds(const Model& m, const Arc& inner,
                                     const Arc& outer,
                                     const LocalBoundOptions& opts = {});

// Residual of the exact commutator expansion
//   2Re(V ad_A V*) = -2C - 2(1-R)*C(1-R) + 4Re((1-R)*C) + 2Re(R* ad_A R)
// with C = A - UAU*, R = UV*; the mirrored identity is this one with U
// replaced by U* and V by V*.
double commutator_identity_residual(const Matrix& u, const Matrix& v,
                                    const Matrix& a_op);

}  // namespace laplab
