#include "laplab/checks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace laplab {

namespace {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

Matrix imag_part(const Matrix& m) { return (m - m.adjoint()) / Complex(0, 2.0); }

// Orthonormal basis of the spectral subspace of a unitary over an arc.
Matrix arc_basis(const Matrix& u, const Arc& arc, double tol = 1e-10) {
  UnitaryEig eig = unitary_eig(u, tol);
  std::vector<int> sel;
  for (int i = 0; i < eig.angles.size(); ++i)
    if (arc.contains(eig.angles[i])) sel.push_back(i);
  Matrix y(u.rows(), static_cast<int>(sel.size()));
  for (size_t j = 0; j < sel.size(); ++j) y.col(j) = eig.vectors.col(sel[j]);
  return y;
}

MourreReport mourre_finish(const Matrix& u, const Matrix& cu, const Matrix& c,
                           const Arc& arc, double a, double d0) {
  MourreReport rep;
  rep.arc = arc;
  rep.a = a;
  rep.d0 = d0;
  Matrix y = arc_basis(u, arc);
  rep.dim_ranE = static_cast<int>(y.cols());
  if (rep.dim_ranE == 0) {
    rep.vacuous = true;
    rep.strict = true;
    return rep;
  }
  rep.min_eig = min_eig(hermitian_part(y.adjoint() * cu * y));
  rep.min_eig_alt = min_eig(hermitian_part(y.adjoint() * c * y));
  rep.strict = rep.min_eig >= a - 1e-10;
  return rep;
}

}  // namespace

// ---------------------------------------------------------------------------
// propagation estimate
// ---------------------------------------------------------------------------

MourreReport mourre_check(const Model& m, const Arc& arc, double a,
                          const std::optional<Arc>& outer) {
  if (!m.has_U() || !m.has_A())
    throw std::invalid_argument(
        "mourre_check: model lacks a unitary factor or a conjugate operator");
  double d0 = outer ? arc_gap(arc, *outer) : 0.0;
  return mourre_finish(m.U->mat, interior_mourre_CU(m), interior_mourre_C(m),
                       arc, a, d0);
}

MourreReport mourre_check(const Matrix& u, const Matrix& a_op, const Arc& arc,
                          double a) {
  Matrix cu = u.adjoint() * a_op * u - a_op;
  Matrix c = a_op - u * a_op * u.adjoint();
  return mourre_finish(u, cu, c, arc, a, 0.0);
}

TruncatedOperator spectral_projection(const TruncatedOperator& u, const Arc& arc,
                                      double tol) {
  return TruncatedOperator(spectral_projection(u.mat, arc, tol), u.window,
                           u.boundary);
}

// ---------------------------------------------------------------------------
// global positivity
// ---------------------------------------------------------------------------

GlobalPositivityReport global_positivity(const Model& m, double floor) {
  if (!m.has_A())
    throw std::invalid_argument("global_positivity: model lacks a conjugate operator");
  Matrix gp = interior_eval(m, [](const RawOps& r) {
    Matrix w = ad(*r.A, r.V);
    return hermitian_part(r.V.adjoint() * w);
  });
  GlobalPositivityReport rep;
  rep.floor = floor;
  rep.a0 = min_eig(hermitian_part(gp));
  rep.b = op_norm(interior_ad_A_V(m));
  rep.holds = rep.a0 > floor;
  return rep;
}

double global_positivity(const Matrix& v, const Matrix& a_op) {
  return min_eig(hermitian_part(v.adjoint() * ad(a_op, v)));
}

// ---------------------------------------------------------------------------
// weak commutator smallness
// ---------------------------------------------------------------------------

double alpha_max_for(const Matrix& w) {
  if (w.rows() != w.cols())
    throw std::invalid_argument("alpha_max_for: matrix is not square");
  const int n = static_cast<int>(w.rows());
  Matrix wb = Matrix::Identity(n, n) - w;
  Matrix base = wb + wb.adjoint();
  Matrix sq = wb.adjoint() * wb;
  auto feasible = [&](double al) {
    return min_eig(hermitian_part(base - (1.0 + al) * sq)) >= -1e-10;
  };
  if (feasible(4.0)) return 4.0;
  double lo = 0.0, hi = 4.0;
  while (hi - lo > 1e-6) {
    double mid = (lo + hi) / 2.0;
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

H4Report h4_check(const Model& m, double a) {
  if (!m.has_A() || !m.has_U())
    throw std::invalid_argument("h4_check: family lacks conjugate operator");
  H4Report rep;
  rep.a = a;
  auto entry = [&](const char* name, bool adjoint_first) {
    H4Entry e;
    e.name = name;
    Matrix comm = interior_eval(m, [adjoint_first](const RawOps& r) {
      Matrix w = adjoint_first ? Matrix(r.U->adjoint() * r.V)
                               : Matrix(*r.U * r.V.adjoint());
      return (Complex(0, 1) * ad(*r.A, imag_part(w))).eval();
    });
    e.m = op_norm(comm);
    Matrix w = adjoint_first ? Matrix(m.U->mat.adjoint() * m.V.mat)
                             : Matrix(m.U->mat * m.V.mat.adjoint());
    e.alpha_max = alpha_max_for(w);
    e.pass = e.m < a && e.alpha_max > 0.0;
    return e;
  };
  rep.entries.push_back(entry("UV*", false));
  rep.entries.push_back(entry("U*V", true));
  rep.holds = rep.entries[0].pass && rep.entries[1].pass;
  return rep;
}

// ---------------------------------------------------------------------------
// boundary eigenvector rigidity
// ---------------------------------------------------------------------------

VirialReport virial_check(const Model& m, double tol) {
  if (!m.has_U())
    throw std::invalid_argument("virial_check: model lacks a unitary factor");
  VirialReport rep;
  rep.tol = tol;
  Eigen::ComplexEigenSolver<Matrix> es(m.V.mat);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("virial_check: eigensolver failed");
  for (int i = 0; i < m.dim(); ++i) {
    Complex lam = es.eigenvalues()[i];
    if (std::abs(lam) < 1.0 - tol) continue;
    Vector psi = es.eigenvectors().col(i);
    psi /= psi.norm();
    VirialPair pair;
    pair.lambda = lam;
    pair.res_U = (m.U->mat * psi - lam * psi).norm();
    pair.res_P = (m.P.mat * psi - psi).norm();
    pair.res_Q = (m.Q.mat * psi - psi).norm();
    rep.pairs.push_back(pair);
    rep.worst_residual = std::max(
        rep.worst_residual, std::max(pair.res_U, std::max(pair.res_P, pair.res_Q)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// projected/global equivalence
// ---------------------------------------------------------------------------

MourreEquivalence mourre_equiv(const Matrix& b_op, const Matrix& e_proj,
                               double c) {
  if (c <= 0.0)
    throw std::invalid_argument("mourre_equiv: c must be positive");
  const int n = static_cast<int>(b_op.rows());
  if (b_op.cols() != n || e_proj.rows() != n || e_proj.cols() != n)
    throw std::invalid_argument("mourre_equiv: dimension mismatch");
  if (op_norm(e_proj * e_proj - e_proj) > 1e-10 ||
      op_norm(e_proj - e_proj.adjoint()) > 1e-10)
    throw std::invalid_argument("mourre_equiv: E is not an orthogonal projection");
  HermEig be = herm_eig(b_op);  // validates hermiticity

  MourreEquivalence out;
  HermEig ee = herm_eig((e_proj + e_proj.adjoint()) / 2.0);
  std::vector<int> sel;
  for (int i = 0; i < n; ++i)
    if (ee.eigenvalues[i] > 0.5) sel.push_back(i);
  if (sel.empty()) {
    out.compression_min_eig = std::numeric_limits<double>::infinity();
  } else {
    Matrix y(n, static_cast<int>(sel.size()));
    for (size_t j = 0; j < sel.size(); ++j) y.col(j) = ee.vectors.col(sel[j]);
    out.compression_min_eig = min_eig(hermitian_part(y.adjoint() * b_op * y));
  }
  if (out.compression_min_eig < c - 1e-10)
    throw std::invalid_argument("mourre_equiv: form (a) fails");

  double bnorm = std::max(std::abs(be.eigenvalues.minCoeff()),
                          std::abs(be.eigenvalues.maxCoeff()));
  out.a = c / 2.0;
  out.b = bnorm * (1.0 + 2.0 * bnorm / c);
  Matrix id = Matrix::Identity(n, n);
  out.certificate_min_eig = min_eig(
      hermitian_part(b_op - out.a * e_proj + out.b * (id - e_proj)));
  out.ok = out.certificate_min_eig >= -1e-10;
  return out;
}

// ---------------------------------------------------------------------------
// local lower bounds
// ---------------------------------------------------------------------------

double commutator_identity_residual(const Matrix& u, const Matrix& v,
                                    const Matrix& a_op) {
  const int n = static_cast<int>(u.rows());
  if (v.rows() != n || a_op.rows() != n || u.cols() != n || v.cols() != n ||
      a_op.cols() != n)
    throw std::invalid_argument("commutator_identity_residual: dimension mismatch");
  Matrix id = Matrix::Identity(n, n);
  Matrix c = a_op - u * a_op * u.adjoint();
  Matrix r = u * v.adjoint();
  Matrix rb = id - r;
  Matrix lhs = 2.0 * hermitian_part(v * ad(a_op, v.adjoint()));
  Matrix rhs = -2.0 * c - 2.0 * (rb.adjoint() * c * rb) +
               4.0 * hermitian_part(rb.adjoint() * c) +
               2.0 * hermitian_part(r.adjoint() * ad(a_op, r));
  return op_norm(lhs - rhs);
}

LocalBoundsReport local_lower_bounds(const Model& m, const Arc& inner,
                                     const Arc& outer,
                                     const LocalBoundOptions& opts) {
  if (!m.has_U() || !m.has_A())
    throw std::invalid_argument(
        "local_lower_bounds: model lacks a unitary factor or a conjugate operator");
  LocalBoundsReport rep;
  rep.d0 = arc_gap(inner, outer);

  const Matrix& u = m.U->mat;
  const Matrix& v = m.V.mat;
  const Matrix& a_op = m.A->mat;
  rep.identity_residual_R = commutator_identity_residual(u, v, a_op);
  rep.identity_residual_L =
      commutator_identity_residual(u.adjoint(), v.adjoint(), a_op);

  const int n = m.dim();
  Matrix id = Matrix::Identity(n, n);
  Matrix eperp = id - spectral_projection(u, outer);

  Matrix lhs1 = hermitian_part(interior_eval(m, [](const RawOps& r) {
    Matrix cu = r.U->adjoint() * *r.A * *r.U - *r.A;
    Matrix imr = imag_part(*r.U * r.V.adjoint());
    return (cu - Complex(0, 1) * ad(*r.A, imr)).eval();
  }));
  Matrix lhs2 = hermitian_part(interior_eval(m, [](const RawOps& r) {
    Matrix ci = *r.A - *r.U * *r.A * r.U->adjoint();
    Matrix iml = imag_part(r.V.adjoint() * *r.U);
    return (ci - Complex(0, 1) * ad(*r.A, iml)).eval();
  }));

  std::vector<double> grid = opts.a1_grid;
  if (grid.empty()) {
    grid.push_back(0.0);
    for (int k = -6; k <= 4; ++k) grid.push_back(std::pow(10.0, k / 2.0));
  }
  bool found = false;
  double best_a0 = -std::numeric_limits<double>::infinity();
  double best_a1 = grid.empty() ? 0.0 : grid.back();
  for (double a1 : grid) {
    double a0v = std::min(min_eig(hermitian_part(lhs1 + a1 * eperp)),
                          min_eig(hermitian_part(lhs2 + a1 * eperp)));
    rep.a1_curve.emplace_back(a1, a0v);
    if (!found && a0v > opts.feasibility_floor) {
      found = true;
      rep.a1 = a1;
      rep.a0 = a0v;
    }
    if (a0v > best_a0) {
      best_a0 = a0v;
      best_a1 = a1;
    }
  }
  rep.feasible = found;
  if (!found) {  // report the least-bad pair so the caller sees how close it got
    rep.a1 = best_a1;
    rep.a0 = best_a0;
  }

  Matrix adavi = interior_ad_A_V(m);
  rep.b = op_norm(adavi);
  Matrix rbar = id - u * v.adjoint();
  Matrix rbar_sq = rbar.adjoint() * rbar;
  double worst = std::numeric_limits<double>::infinity();
  const int nr = std::max(opts.radial_points, 1);
  const int na = std::max(opts.angular_points, 1);
  for (double eps : opts.epsilons) {
    Matrix veps = v - eps * adavi;
    for (int i = 0; i < nr; ++i) {
      double r = nr == 1 ? opts.r_max
                         : opts.r_min + (opts.r_max - opts.r_min) * i / (nr - 1);
      for (int j = 0; j < na; ++j) {
        double th = inner.lo + inner.span() * (na == 1 ? 0.5 : double(j) / (na - 1));
        Complex z = std::polar(r, th);
        Matrix t = id - z * veps.adjoint();
        double coef = std::isinf(rep.d0)
                          ? 0.0
                          : 3.0 * kPi * kPi / (4.0 * rep.d0 * rep.d0 * std::abs(z));
        Matrix rhs = coef * (t.adjoint() * t + std::norm(z) * rbar_sq +
                             rep.b * rep.b * eps * eps * std::norm(z) * id);
        worst = std::min(worst, min_eig(hermitian_part(rhs - eperp)));
      }
    }
  }
  rep.eperp_worst = worst;
  return rep;
}

}  // namespace laplab
