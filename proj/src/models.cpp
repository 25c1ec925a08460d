#include "laplab/models.hpp"

#include "strfmt.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace laplab {

namespace {

Matrix position_diag(const Window& w) {
  Matrix a = Matrix::Zero(w.dim(), w.dim());
  const int d = w.internal_dim;
  for (int s = 0; s < w.sites(); ++s) {
    double x = w.site_lo() + s;
    for (int k = 0; k < d; ++k) a(s * d + k, s * d + k) = x;
  }
  return a;
}

Matrix half_line_projection(const Window& w) {
  Matrix p = Matrix::Zero(w.dim(), w.dim());
  const int d = w.internal_dim;
  for (int s = 0; s < w.sites(); ++s)
    if (w.site_lo() + s >= 0)
      for (int k = 0; k < d; ++k) p(s * d + k, s * d + k) = 1.0;
  return p;
}

Model assemble(ModelFamily family, std::string label,
               std::function<RawOps(int)> make, int n, int pad) {
  RawOps raw = make(n);
  Model m;
  m.family = family;
  m.label = std::move(label);
  if (raw.U) m.U = TruncatedOperator(*raw.U, raw.window, raw.boundary);
  m.P = TruncatedOperator(raw.P, raw.window, raw.boundary);
  m.Q = TruncatedOperator(raw.Q, raw.window, raw.boundary);
  m.V = TruncatedOperator(raw.V, raw.window, raw.boundary);
  if (raw.A) m.A = TruncatedOperator(*raw.A, raw.window, raw.boundary);
  m.rebuild = std::move(make);
  m.interior_pad = pad;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

Model build_fundamental(int n) {
  if (n < 2)
    throw std::invalid_argument("build_fundamental: half width must be at least 2");
  auto make = [](int half) {
    Window w{WindowKind::bilateral, half, 1};
    RawOps raw;
    raw.window = w;
    raw.boundary = BoundaryMode::periodic_wrap;
    Matrix u = circulant(Symbol::monomial(1), w);
    Matrix q = Matrix::Identity(w.dim(), w.dim());
    q(half, half) = 0.0;  // site 0 absorbs
    raw.U = u;
    raw.P = Matrix::Identity(w.dim(), w.dim());
    raw.Q = q;
    raw.V = u * q;
    raw.A = position_diag(w);
    return raw;
  };
  return assemble(ModelFamily::fundamental, detail::strf("fundamental(N=%d)", n),
                  make, n, 16);
}

Model build_forward_shift(int n) {
  if (n < 2)
    throw std::invalid_argument("build_forward_shift: half width must be at least 2");
  auto make = [](int half) {
    Window w{WindowKind::unilateral, half, 1};
    RawOps raw;
    raw.window = w;
    raw.boundary = BoundaryMode::hard_cutoff;
    const int dim = w.dim();
    Matrix v = Matrix::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) v(i + 1, i) = 1.0;
    raw.P = Matrix::Identity(dim, dim);
    raw.Q = Matrix::Identity(dim, dim);
    raw.V = v;
    raw.A = position_diag(w);
    return raw;
  };
  return assemble(ModelFamily::forward_shift,
                  detail::strf("forward_shift(N=%d)", n), make, n, 16);
}

Model build_toeplitz(const Symbol& f, int n) {
  Symbol ft = f.trimmed(1e-14);
  double defect = ft.max_unimodular_defect();
  if (defect > 1e-10)
    throw std::invalid_argument(detail::strf(
        "build_toeplitz: symbol is not unitary on the circle (defect %.3e)",
        defect));
  Symbol g = velocity_symbol(ft);
  int band = std::max(ft.half_order(), g.half_order());
  if (2 * n + 1 < 2 * band + 1)
    throw std::invalid_argument(detail::strf(
        "build_toeplitz: symbol band %d exceeds the window (half width %d)",
        band, n));
  auto make = [ft, g](int half) {
    Window w{WindowKind::bilateral, half, 1};
    RawOps raw;
    raw.window = w;
    raw.boundary = BoundaryMode::periodic_wrap;
    Matrix u = circulant(ft, w);
    Matrix p = half_line_projection(w);
    Matrix lg = circulant(g, w);
    Matrix x = position_diag(w);
    raw.U = u;
    raw.P = p;
    raw.Q = p;
    raw.V = p * u * p;
    // products with the diagonal x are entrywise scalings, so this
    // anticommutator is Hermitian to the last bit
    raw.A = (lg * x + x * lg) / 2.0;
    return raw;
  };
  return assemble(ModelFamily::toeplitz,
                  detail::strf("toeplitz(N=%d, M=%d)", n, ft.half_order()), make,
                  n, 8 * band + 8);
}

MatrixSymbol split_step_shift_coin(double coin_angle) {
  Matrix rot = rotation_block(coin_angle);
  MatrixSymbol s(2, 1);
  Matrix up = Matrix::Zero(2, 2), dn = Matrix::Zero(2, 2);
  up(0, 0) = 1.0;
  dn(1, 1) = 1.0;
  s.coeff_ref(1) = up * rot;
  s.coeff_ref(-1) = dn * rot;
  return s;
}

MatrixSymbol momentum_half_projector() {
  MatrixSymbol p(2, 1);
  p.coeff_ref(0) = 0.5 * Matrix::Identity(2, 2);
  Matrix up = Matrix::Zero(2, 2), dn = Matrix::Zero(2, 2);
  up(0, 1) = 0.5;
  dn(1, 0) = 0.5;
  p.coeff_ref(-1) = up;
  p.coeff_ref(1) = dn;
  return p;
}

Matrix rotation_block(double angle) {
  Matrix r(2, 2);
  r(0, 0) = std::cos(angle);
  r(0, 1) = -std::sin(angle);
  r(1, 0) = std::sin(angle);
  r(1, 1) = std::cos(angle);
  return r;
}

Model build_quantum_walk(const QuantumWalkSpec& spec, int n) {
  if (n < 2)
    throw std::invalid_argument("build_quantum_walk: half width must be at least 2");
  const int d = spec.shift_coin.block_dim();
  if (spec.momentum_absorber.block_dim() != d)
    throw std::invalid_argument("build_quantum_walk: block dimension mismatch");
  if (!spec.site_coin || !spec.site_absorber)
    throw std::invalid_argument("build_quantum_walk: missing site profiles");
  double udef = spec.shift_coin.max_unitary_defect();
  if (udef > 1e-10)
    throw std::invalid_argument(detail::strf(
        "build_quantum_walk: shift coin symbol is not unitary (defect %.3e)", udef));
  {
    // absorber symbol must stay inside the order interval [0, 1]
    int grid = std::max(360, 16 * (spec.momentum_absorber.half_order() + 1));
    double worst = 0.0;
    for (int j = 0; j < grid; ++j) {
      Matrix p = spec.momentum_absorber.eval(2.0 * kPi * j / grid);
      worst = std::max(worst, op_norm(p - p.adjoint()));
      HermEig eig = herm_eig((p + p.adjoint()) / 2.0);
      worst = std::max(worst, std::max(-eig.eigenvalues.minCoeff(),
                                       eig.eigenvalues.maxCoeff() - 1.0));
    }
    if (worst > 1e-10)
      throw std::invalid_argument(detail::strf(
          "build_quantum_walk: momentum absorber leaves [0, 1] (defect %.3e)",
          worst));
  }
  int band = std::max(spec.shift_coin.half_order(),
                      spec.momentum_absorber.half_order());
  auto make = [spec, d](int half) {
    Window w{WindowKind::bilateral, half, d};
    const int dim = w.dim();
    Matrix c1 = block_circulant(spec.shift_coin, w);
    Matrix p1 = block_circulant(spec.momentum_absorber, w);
    Matrix c0 = Matrix::Zero(dim, dim);
    Matrix p0 = Matrix::Zero(dim, dim);
    Matrix id = Matrix::Identity(d, d);
    for (int s = 0; s < w.sites(); ++s) {
      int x = w.site_lo() + s;
      Matrix cb = spec.site_coin(x);
      Matrix pb = spec.site_absorber(x);
      if (cb.rows() != d || cb.cols() != d || pb.rows() != d || pb.cols() != d)
        throw std::invalid_argument(
            detail::strf("build_quantum_walk: site block at x=%d has wrong shape", x));
      if (op_norm(cb.adjoint() * cb - id) > 1e-10)
        throw std::invalid_argument(
            detail::strf("build_quantum_walk: site coin at x=%d is not unitary", x));
      HermEig eig = herm_eig((pb + pb.adjoint()) / 2.0);
      if (op_norm(pb - pb.adjoint()) > 1e-10 ||
          eig.eigenvalues.minCoeff() < -1e-10 ||
          eig.eigenvalues.maxCoeff() > 1.0 + 1e-10)
        throw std::invalid_argument(detail::strf(
            "build_quantum_walk: site absorber at x=%d leaves [0, 1]", x));
      c0.block(s * d, s * d, d, d) = cb;
      p0.block(s * d, s * d, d, d) = pb;
    }
    RawOps raw;
    raw.window = w;
    raw.boundary = BoundaryMode::periodic_wrap;
    raw.U = c0 * c1;
    raw.P = Matrix::Identity(dim, dim);
    raw.Q = p0 * p1 * p0;
    raw.V = *raw.U * raw.Q;
    return raw;
  };
  return assemble(ModelFamily::quantum_walk,
                  detail::strf("%s(N=%d)", spec.label.c_str(), n), make, n,
                  8 * band + 8);
}

// ---------------------------------------------------------------------------
// interior evaluation
// ---------------------------------------------------------------------------

Matrix interior_eval(const Model& m,
                     const std::function<Matrix(const RawOps&)>& expr, int pad) {
  if (!expr) throw std::invalid_argument("interior_eval: empty expression");
  if (!m.rebuild) {
    RawOps raw;
    raw.window = m.window();
    raw.boundary = m.V.boundary;
    if (m.has_U()) raw.U = m.U->mat;
    raw.P = m.P.mat;
    raw.Q = m.Q.mat;
    raw.V = m.V.mat;
    if (m.has_A()) raw.A = m.A->mat;
    Matrix out = expr(raw);
    if (out.rows() != m.dim() || out.cols() != m.dim())
      throw std::logic_error("interior_eval: expression changed dimensions");
    return out;
  }
  if (pad < 0) pad = m.interior_pad;
  RawOps raw = m.rebuild(m.window().half_width + pad);
  Matrix full = expr(raw);
  if (full.rows() != raw.window.dim() || full.cols() != raw.window.dim())
    throw std::logic_error("interior_eval: expression changed dimensions");
  const int d = m.window().internal_dim;
  const int off = (m.window().kind == WindowKind::bilateral) ? pad * d : 0;
  return full.block(off, off, m.dim(), m.dim());
}

Matrix interior_ad_A_V(const Model& m) {
  if (!m.has_A())
    throw std::invalid_argument("interior_ad_A_V: model lacks a conjugate operator");
  return interior_eval(m, [](const RawOps& r) { return ad(*r.A, r.V); });
}

Matrix interior_mourre_CU(const Model& m) {
  if (!m.has_A() || !m.has_U())
    throw std::invalid_argument(
        "interior_mourre_CU: model lacks a unitary factor or a conjugate operator");
  return interior_eval(m, [](const RawOps& r) {
    return (r.U->adjoint() * *r.A * *r.U - *r.A).eval();
  });
}

Matrix interior_mourre_C(const Model& m) {
  if (!m.has_A() || !m.has_U())
    throw std::invalid_argument(
        "interior_mourre_C: model lacks a unitary factor or a conjugate operator");
  return interior_eval(m, [](const RawOps& r) {
    return (*r.A - *r.U * *r.A * r.U->adjoint()).eval();
  });
}

Matrix drop_guard_sites(const Matrix& mat, const Window& w, int guard) {
  if (guard < 0)
    throw std::invalid_argument("drop_guard_sites: negative guard");
  if (mat.rows() != w.dim() || mat.cols() != w.dim())
    throw std::invalid_argument("drop_guard_sites: matrix does not match window");
  const int d = w.internal_dim;
  const int drop_lo = (w.kind == WindowKind::bilateral) ? guard : 0;
  const int kept = w.sites() - drop_lo - guard;
  if (kept < 1)
    throw std::invalid_argument("drop_guard_sites: guard leaves no sites");
  return mat.block(drop_lo * d, drop_lo * d, kept * d, kept * d);
}

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

double ModelDefects::worst() const {
  double w = std::max(v_contraction, std::max(p_range, q_range));
  w = std::max(w, std::max(u_unitary, 0.0));
  w = std::max(w, std::max(a_hermitian, 0.0));
  w = std::max(w, std::max(v_factorization, 0.0));
  return w;
}

ModelDefects model_defects(const Model& m) {
  ModelDefects d;
  d.v_contraction = std::max(0.0, op_norm(m.V.mat) - 1.0);
  auto range_defect = [](const Matrix& p) {
    double herm = op_norm(p - p.adjoint());
    HermEig eig = herm_eig((p + p.adjoint()) / 2.0);
    return herm + std::max(0.0, -eig.eigenvalues.minCoeff()) +
           std::max(0.0, eig.eigenvalues.maxCoeff() - 1.0);
  };
  d.p_range = range_defect(m.P.mat);
  d.q_range = range_defect(m.Q.mat);
  if (m.has_U()) {
    const int n = m.dim();
    d.u_unitary = op_norm(m.U->mat.adjoint() * m.U->mat - Matrix::Identity(n, n));
    d.v_factorization = op_norm(m.V.mat - m.P.mat * m.U->mat * m.Q.mat);
  }
  if (m.has_A()) d.a_hermitian = op_norm(m.A->mat - m.A->mat.adjoint());
  return d;
}

RegularizedFamily c2_family(const Model& m, double epsilon_max) {
  return c2_family(m.V.mat, interior_ad_A_V(m), epsilon_max);
}

}  // namespace laplab
