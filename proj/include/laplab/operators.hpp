#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace laplab {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// truncation windows
// ---------------------------------------------------------------------------

enum class WindowKind { bilateral, unilateral };
enum class BoundaryMode { periodic_wrap, hard_cutoff };

// Finite index window for a lattice truncation.  Bilateral windows cover the
// sites -N..N, unilateral windows cover 0..N.  Each site carries
// internal_dim components (internal_dim > 1 for block models).
struct Window {
  WindowKind kind = WindowKind::bilateral;
  int half_width = 0;
  int internal_dim = 1;

  int sites() const {
    return kind == WindowKind::bilateral ? 2 * half_width + 1 : half_width + 1;
  }
  int dim() const { return sites() * internal_dim; }
  int site_lo() const { return kind == WindowKind::bilateral ? -half_width : 0; }
  int site_hi() const { return half_width; }

  bool operator==(const Window&) const = default;
};

// A dense matrix tagged with the window it lives on and the truncation rule
// that produced it.  Arithmetic between operators on different windows is a
// caller bug and throws.
struct TruncatedOperator {
  Matrix mat;
  Window window;
  BoundaryMode boundary = BoundaryMode::periodic_wrap;

  TruncatedOperator() = default;
  TruncatedOperator(Matrix m, Window w,
                    BoundaryMode b = BoundaryMode::periodic_wrap);

  int dim() const { return static_cast<int>(mat.rows()); }
  TruncatedOperator adjoint() const;
};

TruncatedOperator operator+(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator-(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator*(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator*(Complex s, const TruncatedOperator& a);

// ---------------------------------------------------------------------------
// spectral helpers
// ---------------------------------------------------------------------------

// Operator norm (largest singular value).
double op_norm(const Matrix& m);

struct HermEig {
  RealVector eigenvalues;  // ascending
  Matrix vectors;          // orthonormal columns
};

// Eigendecomposition of a Hermitian matrix.  Throws std::invalid_argument
// when the input is not Hermitian to working precision.
HermEig herm_eig(const Matrix& h);

double min_eig(const Matrix& h);  // smallest eigenvalue of a Hermitian matrix

struct UnitaryEig {
  Vector eigenvalues;      // on the unit circle
  RealVector angles;       // arguments in [0, 2pi), same order
  Matrix vectors;          // orthonormal columns (Schur basis)
};

// Eigendecomposition of a unitary matrix through its Schur form, so the
// returned basis is exactly orthonormal.  Throws when the input fails the
// unitarity check ||U*U - 1|| <= tol.
UnitaryEig unitary_eig(const Matrix& u, double tol = 1e-10);

// phi(U) for unitary U via the spectral theorem; phi acts on the eigenvalue
// arguments in [0, 2pi).
Matrix unitary_calculus(const Matrix& u,
                        const std::function<Complex(double)>& phi,
                        double tol = 1e-10);

// Hermitian functional calculus.
Matrix herm_calculus(const Matrix& h, const std::function<double(double)>& f);

struct Parts {
  Matrix re;   // (B + B*)/2
  Matrix im;   // (B - B*)/(2i)
  Matrix abs;  // (B*B)^(1/2)
};
Parts parts(const Matrix& b);

// Commutator ad(A, B) = AB - BA.
Matrix ad(const Matrix& a, const Matrix& b);
TruncatedOperator ad(const TruncatedOperator& a, const TruncatedOperator& b);

// ---------------------------------------------------------------------------
// arcs on the unit circle
// ---------------------------------------------------------------------------

// Counterclockwise arc from angle lo to angle hi, half open: lo belongs to
// the arc, hi does not.  Spans >= 2pi mean the full circle.  Angles are
// compared mod 2pi; the half-open convention makes spectral projections of
// complementary arcs an exact partition of the identity.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  static Arc full() { return Arc{0.0, 2.0 * kPi}; }
  Arc complement() const;
  double span() const;
  bool is_full() const { return span() >= 2.0 * kPi - 1e-12; }
  bool contains(double theta, double slack = 0.0) const;
};

// Angular distance from the closure of inner to the complement of outer.
// Throws when inner is not strictly inside outer.
double arc_gap(const Arc& inner, const Arc& outer);

// Spectral projection of a unitary onto the eigenvalues with argument in the
// arc.
Matrix spectral_projection(const Matrix& u, const Arc& arc, double tol = 1e-10);

// ---------------------------------------------------------------------------
// polynomial weights
// ---------------------------------------------------------------------------

// <A>^(-s) = (A^2 + 1)^(-s/2) for Hermitian A.  Requires s in (0, 1].
Matrix weight(const Matrix& a, double s);

// Deformed weight <A>^(-s) <eps A>^(s-1) used alongside the regularized
// resolvents.  eps = 0 gives back the plain weight.
Matrix deformed_weight(const Matrix& a, double s, double eps);

// ---------------------------------------------------------------------------
// regularized contraction families
// ---------------------------------------------------------------------------

// One evaluation of a regularized family at a fixed eps: the smoothed
// contraction S, the derivative-like generator B, the working operator
// V_eps = S - eps B, and the error operators of the commutator expansion.
struct FamilySnapshot {
  Matrix S;
  Matrix B;
  Matrix V_eps;
  Matrix Q;      // -ad(A, V_eps)^* up to the family's error term
  Matrix q;      // first-order expansion error
  Matrix Qcal;   // second-order expansion error
};

struct RegularizedFamily {
  Matrix V;  // the underlying contraction
  double epsilon_max = 1.0;
  double b = 0.0;  // sup over eps of ||Q_eps||
  std::function<FamilySnapshot(double)> eval;

  FamilySnapshot at(double eps) const;
};

// The twice-differentiable family built from a contraction and the commutator
// ad(A, V): S is constant, B is constant, both expansion errors vanish.
RegularizedFamily c2_family(const Matrix& v, const Matrix& ad_a_v,
                            double epsilon_max = 1.0);

}  // namespace laplab
