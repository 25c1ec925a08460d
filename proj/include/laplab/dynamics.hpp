#pragma once

#include <vector>

#include "laplab/operators.hpp"

namespace laplab {

// Orbit of a vector under repeated application of a contraction.
struct Trajectory {
  Vector psi0;
  std::vector<Vector> states;  // V^n psi0 for n = 0..nmax
  std::vector<double> norms;   // nonincreasing for contractions
};

// nmax < 0 selects the default horizon 4 * dim.
Trajectory evolve(const TruncatedOperator& v, const Vector& psi, int nmax = -1);

// Largest eigenvalue of the Gram matrix <V^m psi, V^n psi>, m, n <= nmax:
// the exact finite-horizon value of sup over unit phi of
// sum_n |<phi, V^n psi>|^2.
double ac_constant(const TruncatedOperator& v, const Vector& psi,
                   int nmax = -1);

// Partial sums of ||W V^n phi||^2 and ||W V*^n phi||^2, both from n = 0.
struct KatoSums {
  std::vector<double> forward_partial;  // cumulative through index n
  std::vector<double> adjoint_partial;
  double forward = 0.0;
  double adjoint = 0.0;
};
KatoSums kato_sums(const TruncatedOperator& w, const TruncatedOperator& v,
                   const Vector& phi, int nmax = -1);

// Finite-depth unitary dilation: a block unitary on (K+1) copies of the space
// whose top-left compression reproduces V^n for 0 <= n <= K.
struct DilationOperator {
  Matrix u_hat;
  int depth = 0;
  int block_dim = 0;
  double unitarity_residual = 0.0;    // max defect of U*U and UU*
  double compression_residual = 0.0;  // max over n <= K of ||P U^n P - V^n||

  Matrix compression(int n) const;    // top-left block of u_hat^n, n >= 0
  Vector embed(const Vector& psi) const;  // psi in the first block
};
DilationOperator dilate(const TruncatedOperator& v, int k);

// | sum_{|n|<=K} |<phi^, U^n psi^>|^2
//   - sum_{0<=n<=K} |<phi, V^n psi>|^2 - sum_{0<n<=K} |<phi, V*^n psi>|^2 |
// for the embedded vectors; near zero because compressions match exactly.
double dilation_correlation_residual(const DilationOperator& d,
                                     const Vector& phi, const Vector& psi,
                                     const TruncatedOperator& v);

// Splitting into the largest reducing subspace where V acts unitarily and
// its completely non-unitary complement.
struct CnuSplit {
  Matrix unitary_projector;
  Matrix cnu_projector;
  int unitary_rank = 0;
};
CnuSplit cnu_split(const TruncatedOperator& v);

}  // namespace laplab
