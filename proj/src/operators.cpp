#include "laplab/operators.hpp"

#include "strfmt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace laplab {

namespace {

double ang_mod(double x) {
  double m = std::fmod(x, 2.0 * kPi);
  if (m < 0) m += 2.0 * kPi;
  return m;
}

void require_square(const Matrix& m, const char* fn) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(detail::strf("%s: matrix is not square", fn));
}

}  // namespace

// ---------------------------------------------------------------------------
// TruncatedOperator
// ---------------------------------------------------------------------------

TruncatedOperator::TruncatedOperator(Matrix m, Window w, BoundaryMode b)
    : mat(std::move(m)), window(w), boundary(b) {
  if (mat.rows() != mat.cols() || mat.rows() != window.dim())
    throw std::invalid_argument(
        detail::strf("TruncatedOperator: %ldx%ld matrix does not fit a window of dim %d",
                     (long)mat.rows(), (long)mat.cols(), window.dim()));
}

TruncatedOperator TruncatedOperator::adjoint() const {
  return TruncatedOperator(mat.adjoint(), window, boundary);
}

namespace {
void require_same_window(const TruncatedOperator& a, const TruncatedOperator& b,
                         const char* fn) {
  if (!(a.window == b.window))
    throw std::invalid_argument(detail::strf("%s: window mismatch", fn));
}
}  // namespace

TruncatedOperator operator+(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_window(a, b, "operator+");
  return TruncatedOperator(a.mat + b.mat, a.window, a.boundary);
}

TruncatedOperator operator-(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_window(a, b, "operator-");
  return TruncatedOperator(a.mat - b.mat, a.window, a.boundary);
}

TruncatedOperator operator*(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_window(a, b, "operator*");
  return TruncatedOperator(a.mat * b.mat, a.window, a.boundary);
}

TruncatedOperator operator*(Complex s, const TruncatedOperator& a) {
  return TruncatedOperator(s * a.mat, a.window, a.boundary);
}

// ---------------------------------------------------------------------------
// spectral helpers
// ---------------------------------------------------------------------------

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // largest eigenvalue of M*M; accurate to machine precision for the top end
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m,
                                           Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

HermEig herm_eig(const Matrix& h) {
  require_square(h, "herm_eig");
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  double defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-12 * scale)
    throw std::invalid_argument(
        detail::strf("herm_eig: matrix is not Hermitian (defect %.3e)", defect));
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed");
  return HermEig{es.eigenvalues(), es.eigenvectors()};
}

double min_eig(const Matrix& h) {
  return herm_eig(h).eigenvalues.minCoeff();
}

UnitaryEig unitary_eig(const Matrix& u, double tol) {
  require_square(u, "unitary_eig");
  const int n = static_cast<int>(u.rows());
  double defect = op_norm(u.adjoint() * u - Matrix::Identity(n, n));
  if (defect > tol)
    throw std::invalid_argument(
        detail::strf("unitary_eig: matrix is not unitary (defect %.3e)", defect));
  // Schur form of a unitary matrix is diagonal and the Schur basis is exactly
  // orthonormal, which keeps spectral projections honest.
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("unitary_eig: Schur decomposition failed");
  UnitaryEig out;
  out.eigenvalues = schur.matrixT().diagonal();
  out.vectors = schur.matrixU();
  out.angles.resize(n);
  for (int i = 0; i < n; ++i)
    out.angles[i] = ang_mod(std::arg(out.eigenvalues[i]));
  return out;
}

Matrix unitary_calculus(const Matrix& u,
                        const std::function<Complex(double)>& phi, double tol) {
  UnitaryEig eig = unitary_eig(u, tol);
  Vector d(eig.angles.size());
  for (int i = 0; i < d.size(); ++i) d[i] = phi(eig.angles[i]);
  return eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
}

Matrix herm_calculus(const Matrix& h, const std::function<double(double)>& f) {
  HermEig eig = herm_eig(h);
  RealVector d(eig.eigenvalues.size());
  for (int i = 0; i < d.size(); ++i) d[i] = f(eig.eigenvalues[i]);
  return eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
}

Parts parts(const Matrix& b) {
  require_square(b, "parts");
  Parts out;
  out.re = (b + b.adjoint()) / 2.0;
  out.im = (b - b.adjoint()) / Complex(0.0, 2.0);
  out.abs = herm_calculus(b.adjoint() * b,
                          [](double t) { return std::sqrt(std::max(t, 0.0)); });
  return out;
}

Matrix ad(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("ad: dimension mismatch");
  return a * b - b * a;
}

TruncatedOperator ad(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_window(a, b, "ad");
  return TruncatedOperator(ad(a.mat, b.mat), a.window, a.boundary);
}

// ---------------------------------------------------------------------------
// arcs
// ---------------------------------------------------------------------------

double Arc::span() const {
  double raw = hi - lo;
  if (raw >= 2.0 * kPi) return 2.0 * kPi;
  if (raw < 0) raw = ang_mod(raw);
  return raw;
}

Arc Arc::complement() const {
  if (is_full()) return Arc{0.0, 0.0};
  double a = ang_mod(hi);
  return Arc{a, a + (2.0 * kPi - span())};
}

bool Arc::contains(double theta, double slack) const {
  if (is_full()) return true;
  double d = ang_mod(theta - lo);
  if (d >= 2.0 * kPi - slack) d = 0.0;
  return d < span() + slack;
}

double arc_gap(const Arc& inner, const Arc& outer) {
  if (outer.is_full()) return std::numeric_limits<double>::infinity();
  double a = ang_mod(inner.lo - outer.lo);
  double b = a + inner.span();
  double so = outer.span();
  if (!(a > 0.0 && b < so))
    throw std::invalid_argument("arc_gap: inner arc is not strictly inside the outer arc");
  return std::min(a, so - b);
}

Matrix spectral_projection(const Matrix& u, const Arc& arc, double tol) {
  UnitaryEig eig = unitary_eig(u, tol);
  const int n = static_cast<int>(u.rows());
  Matrix proj = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (arc.contains(eig.angles[i]))
      proj += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  return proj;
}

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

namespace {
void require_s(double s, const char* fn) {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument(detail::strf("%s: s must lie in (0, 1]", fn));
}
}  // namespace

Matrix weight(const Matrix& a, double s) {
  require_s(s, "weight");
  return herm_calculus(
      a, [s](double t) { return std::pow(1.0 + t * t, -s / 2.0); });
}

Matrix deformed_weight(const Matrix& a, double s, double eps) {
  require_s(s, "deformed_weight");
  if (eps < 0)
    throw std::invalid_argument("deformed_weight: eps must be nonnegative");
  return herm_calculus(a, [s, eps](double t) {
    return std::pow(1.0 + t * t, -s / 2.0) *
           std::pow(1.0 + eps * eps * t * t, (s - 1.0) / 2.0);
  });
}

// ---------------------------------------------------------------------------
// regularized families
// ---------------------------------------------------------------------------

FamilySnapshot RegularizedFamily::at(double eps) const {
  if (!(eps >= 0.0 && eps <= epsilon_max))
    throw std::invalid_argument(
        detail::strf("RegularizedFamily: eps %g outside [0, %g]", eps, epsilon_max));
  if (!eval) throw std::logic_error("RegularizedFamily: evaluator not set");
  return eval(eps);
}

RegularizedFamily c2_family(const Matrix& v, const Matrix& ad_a_v,
                            double epsilon_max) {
  if (v.rows() != v.cols() || ad_a_v.rows() != ad_a_v.cols() ||
      v.rows() != ad_a_v.rows())
    throw std::invalid_argument("c2_family: dimension mismatch");
  if (op_norm(v) > 1.0 + 1e-10)
    throw std::invalid_argument("c2_family: V is not a contraction");
  RegularizedFamily fam;
  fam.V = v;
  fam.epsilon_max = epsilon_max;
  fam.b = op_norm(ad_a_v);
  const int n = static_cast<int>(v.rows());
  Matrix q_const = -ad_a_v.adjoint();
  Matrix zero = Matrix::Zero(n, n);
  fam.eval = [v, ad_a_v, q_const, zero](double eps) {
    FamilySnapshot snap;
    snap.S = v;
    snap.B = ad_a_v;
    snap.V_eps = v - eps * ad_a_v;
    snap.Q = q_const;
    snap.q = zero;
    snap.Qcal = zero;
    return snap;
  };
  return fam;
}

}  // namespace laplab
