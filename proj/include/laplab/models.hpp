#pragma once

#include "laplab/operators.hpp"
#include "laplab/symbols.hpp"

namespace laplab {

enum class ModelFamily { fundamental, forward_shift, toeplitz, quantum_walk, custom };

// Operators of a model on some window before any boundary clean-up.  U and A
// are absent for families that lack them.
struct RawOps {
  Window window;
  BoundaryMode boundary = BoundaryMode::periodic_wrap;
  std::optional<Matrix> U;
  Matrix P, Q, V;
  std::optional<Matrix> A;
};

// A truncated model: the contraction V = P U Q together with its factors and
// the conjugate operator A when the family provides one.  rebuild() produces
// the same model on a wider window, which is how interior evaluation removes
// truncation artifacts.
struct Model {
  ModelFamily family = ModelFamily::custom;
  std::string label;
  std::optional<TruncatedOperator> U;
  TruncatedOperator P, Q, V;
  std::optional<TruncatedOperator> A;
  std::function<RawOps(int)> rebuild;  // argument is the half width
  int interior_pad = 0;

  int dim() const { return V.dim(); }
  const Window& window() const { return V.window; }
  bool has_U() const { return U.has_value(); }
  bool has_A() const { return A.has_value(); }
};

// Bilateral shift with one absorbing site: U the periodic shift, Q the
// projection killing e_0, V = U Q, A the position operator.
Model build_fundamental(int n);

// Nilpotent forward shift on 0..n with position conjugate operator.
Model build_forward_shift(int n);

// Half-line compression of the circulant with unitary symbol f, conjugate
// operator A = (L_g X + X L_g)/2 with g = i f conj(f').
Model build_toeplitz(const Symbol& f, int n);

struct QuantumWalkSpec {
  MatrixSymbol shift_coin;                   // unitary momentum factor
  MatrixSymbol momentum_absorber;            // 0 <= p(theta) <= 1
  std::function<Matrix(int)> site_coin;      // unitary block per site
  std::function<Matrix(int)> site_absorber;  // 0 <= block <= 1 per site
  std::string label = "quantum_walk";
};

// Coined walk U = C0 C1 with absorption Q = P0 P1 P0 applied before each
// step; no conjugate operator.
Model build_quantum_walk(const QuantumWalkSpec& spec, int n);

// Split-step ingredients: the shift-coin symbol diag(e^{i t}, e^{-i t}) R(b)
// and the rank-one projector field (1/2)[[1, e^{-i t}], [e^{i t}, 1]].
MatrixSymbol split_step_shift_coin(double coin_angle);
MatrixSymbol momentum_half_projector();
Matrix rotation_block(double angle);

// Evaluate an operator expression free of truncation artifacts: rebuild the
// model on a padded window, apply expr there, restrict to the central block.
// pad < 0 uses the model's own interior_pad.  Models without rebuild are
// evaluated as-is.
Matrix interior_eval(const Model& m,
                     const std::function<Matrix(const RawOps&)>& expr,
                     int pad = -1);

Matrix interior_ad_A_V(const Model& m);     // ad(A, V)
Matrix interior_mourre_CU(const Model& m);  // U* A U - A
Matrix interior_mourre_C(const Model& m);   // A - U A U*

// Drop guard sites next to each truncation edge (both edges of a bilateral
// window, the top edge of a unilateral one).
Matrix drop_guard_sites(const Matrix& mat, const Window& w, int guard);

struct ModelDefects {
  double v_contraction = 0;    // excess of ||V|| over 1
  double p_range = 0;          // distance of P from the order interval [0, 1]
  double q_range = 0;
  double u_unitary = -1;       // ||U*U - 1||, -1 when U is absent
  double a_hermitian = -1;     // ||A - A*||, -1 when A is absent
  double v_factorization = -1; // ||V - P U Q||, -1 when U is absent
  double worst() const;
};
ModelDefects model_defects(const Model& m);

// Twice-differentiable regularization driven by the interior commutator.
RegularizedFamily c2_family(const Model& m, double epsilon_max = 1.0);

}  // namespace laplab
