#include "laplab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "strfmt.hpp"

namespace laplab {

namespace {

constexpr double kContractionSlack = 1e-10;

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

int resolve_horizon(int nmax, int dim) {
  if (nmax >= 0) return nmax;
  return 4 * dim;
}

void require_dim(const TruncatedOperator& v, const Vector& x,
                 const char* who) {
  if (x.size() != v.dim())
    throw std::invalid_argument(detail::strf(
        "%s: vector length %d does not match operator dimension %d", who,
        static_cast<int>(x.size()), v.dim()));
}

void require_contraction(const TruncatedOperator& v, const char* who) {
  const double nrm = op_norm(v.mat);
  if (nrm > 1.0 + kContractionSlack)
    throw std::invalid_argument(
        detail::strf("%s: operator norm %.12g exceeds 1", who, nrm));
}

// Square root of a positive semidefinite Hermitian matrix.  Rounding leaves
// eigenvalues of 1 - V*V at the 1e-16 level where the true defect vanishes,
// and sqrt would lift that noise to 1e-8, so snap noise-level values to zero.
Matrix psd_sqrt(const Matrix& h) {
  return herm_calculus(
      h, [](double x) { return x <= 1e-13 ? 0.0 : std::sqrt(x); });
}

}  // namespace

Trajectory evolve(const TruncatedOperator& v, const Vector& psi, int nmax) {
  require_contraction(v, "evolve");
  require_dim(v, psi, "evolve");
  const int steps = resolve_horizon(nmax, v.dim());

  Trajectory out;
  out.psi0 = psi;
  out.states.reserve(steps + 1);
  out.norms.reserve(steps + 1);
  out.states.push_back(psi);
  out.norms.push_back(psi.norm());
  for (int n = 1; n <= steps; ++n) {
    out.states.push_back(v.mat * out.states.back());
    out.norms.push_back(out.states.back().norm());
  }
  return out;
}

double ac_constant(const TruncatedOperator& v, const Vector& psi, int nmax) {
  require_dim(v, psi, "ac_constant");
  const int steps = resolve_horizon(nmax, v.dim());

  std::vector<Vector> orbit;
  orbit.reserve(steps + 1);
  orbit.push_back(psi);
  for (int n = 1; n <= steps; ++n) orbit.push_back(v.mat * orbit.back());

  Matrix gram(steps + 1, steps + 1);
  for (int m = 0; m <= steps; ++m) {
    gram(m, m) = orbit[m].squaredNorm();
    for (int n = m + 1; n <= steps; ++n) {
      const Complex g = orbit[m].dot(orbit[n]);
      gram(m, n) = g;
      gram(n, m) = std::conj(g);
    }
  }
  const HermEig eig = herm_eig(gram);
  return std::max(0.0, eig.eigenvalues(eig.eigenvalues.size() - 1));
}

KatoSums kato_sums(const TruncatedOperator& w, const TruncatedOperator& v,
                   const Vector& phi, int nmax) {
  if (w.dim() != v.dim())
    throw std::invalid_argument(detail::strf(
        "kato_sums: weight dimension %d does not match operator dimension %d",
        w.dim(), v.dim()));
  require_dim(v, phi, "kato_sums");
  const int steps = resolve_horizon(nmax, v.dim());

  KatoSums out;
  out.forward_partial.reserve(steps + 1);
  out.adjoint_partial.reserve(steps + 1);
  const Matrix vadj = v.mat.adjoint();
  Vector fwd = phi;  // V^n phi
  Vector adj = phi;  // V*^n phi
  for (int n = 0; n <= steps; ++n) {
    if (n > 0) {
      fwd = v.mat * fwd;
      adj = vadj * adj;
    }
    out.forward += (w.mat * fwd).squaredNorm();
    out.adjoint += (w.mat * adj).squaredNorm();
    out.forward_partial.push_back(out.forward);
    out.adjoint_partial.push_back(out.adjoint);
  }
  return out;
}

Matrix DilationOperator::compression(int n) const {
  if (n < 0)
    throw std::invalid_argument("compression: power must be nonnegative");
  Matrix pow = Matrix::Identity(u_hat.rows(), u_hat.cols());
  for (int i = 0; i < n; ++i) pow = u_hat * pow;
  return pow.topLeftCorner(block_dim, block_dim);
}

Vector DilationOperator::embed(const Vector& psi) const {
  if (psi.size() != block_dim)
    throw std::invalid_argument(detail::strf(
        "embed: vector length %d does not match block dimension %d",
        static_cast<int>(psi.size()), block_dim));
  Vector out = Vector::Zero(u_hat.rows());
  out.head(block_dim) = psi;
  return out;
}

// Block rotation on K+1 copies of the space:
//   row 0:  V x_0        + D_{V*} x_K
//   row 1:  D_V x_0      - V*    x_K
//   row j:  x_{j-1}                      (2 <= j <= K)
// The defect channel opened in block 1 takes K steps to travel back to the
// top block, so the compression of U^n to the first block is exactly V^n for
// every n <= K.  K = 1 is the classical 2x2 rotation [[V, D_{V*}], [D_V, -V*]].
DilationOperator dilate(const TruncatedOperator& v, int k) {
  require_contraction(v, "dilate");
  if (k < 1) throw std::invalid_argument("dilate: depth must be at least 1");
  const int n = v.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix dv = psd_sqrt(id - v.mat.adjoint() * v.mat);
  const Matrix dvadj = psd_sqrt(id - v.mat * v.mat.adjoint());

  DilationOperator out;
  out.depth = k;
  out.block_dim = n;
  out.u_hat = Matrix::Zero(n * (k + 1), n * (k + 1));
  out.u_hat.block(0, 0, n, n) = v.mat;
  out.u_hat.block(0, k * n, n, n) = dvadj;
  out.u_hat.block(n, 0, n, n) = dv;
  out.u_hat.block(n, k * n, n, n) = -v.mat.adjoint();
  for (int j = 2; j <= k; ++j)
    out.u_hat.block(j * n, (j - 1) * n, n, n) = id;

  const Matrix big_id = Matrix::Identity(out.u_hat.rows(), out.u_hat.cols());
  out.unitarity_residual =
      std::max(op_norm(out.u_hat.adjoint() * out.u_hat - big_id),
               op_norm(out.u_hat * out.u_hat.adjoint() - big_id));

  Matrix pow = big_id;
  Matrix vpow = id;
  for (int step = 1; step <= k; ++step) {
    pow = out.u_hat * pow;
    vpow = v.mat * vpow;
    out.compression_residual = std::max(
        out.compression_residual, op_norm(pow.topLeftCorner(n, n) - vpow));
  }
  return out;
}

double dilation_correlation_residual(const DilationOperator& d,
                                     const Vector& phi, const Vector& psi,
                                     const TruncatedOperator& v) {
  if (v.dim() != d.block_dim)
    throw std::invalid_argument(
        "dilation_correlation_residual: operator does not match dilation");
  const Vector phi_hat = d.embed(phi);
  const Vector psi_hat = d.embed(psi);

  double two_sided = 0.0;
  Vector fwd = psi_hat;           // U^n psi^
  Vector bwd = psi_hat;           // U^-n psi^ = U*^n psi^
  const Matrix uadj = d.u_hat.adjoint();
  two_sided += std::norm(phi_hat.dot(psi_hat));
  for (int n = 1; n <= d.depth; ++n) {
    fwd = d.u_hat * fwd;
    bwd = uadj * bwd;
    two_sided += std::norm(phi_hat.dot(fwd));
    two_sided += std::norm(phi_hat.dot(bwd));
  }

  double one_sided = 0.0;
  Vector vf = psi;                // V^n psi
  Vector va = psi;                // V*^n psi
  const Matrix vadj = v.mat.adjoint();
  one_sided += std::norm(phi.dot(psi));
  for (int n = 1; n <= d.depth; ++n) {
    vf = v.mat * vf;
    va = vadj * va;
    one_sided += std::norm(phi.dot(vf));
    one_sided += std::norm(phi.dot(va));
  }
  return std::abs(two_sided - one_sided);
}

// The unitary part is the joint kernel of the defect operators
// 1 - V*^m V^m and 1 - V^m V*^m for m up to the dimension; for a contraction
// each term is positive semidefinite, so the joint kernel is the kernel of
// their sum.
CnuSplit cnu_split(const TruncatedOperator& v) {
  require_contraction(v, "cnu_split");
  const int n = v.dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix accum = Matrix::Zero(n, n);
  Matrix vpow = id;
  const Matrix vadj = v.mat.adjoint();
  Matrix apow = id;
  for (int m = 1; m <= n; ++m) {
    vpow = v.mat * vpow;
    apow = vadj * apow;
    accum += id - vpow.adjoint() * vpow;
    accum += id - apow.adjoint() * apow;
  }

  const HermEig eig = herm_eig(hermitian_part(accum));
  const double top = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double tol = 1e-8 * std::max(1.0, top);

  CnuSplit out;
  out.unitary_projector = Matrix::Zero(n, n);
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) > tol) continue;
    const Vector col = eig.vectors.col(i);
    out.unitary_projector += col * col.adjoint();
    ++out.unitary_rank;
  }
  out.cnu_projector = id - out.unitary_projector;
  return out;
}

}  // namespace laplab
