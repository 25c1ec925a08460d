#include "laplab/symbols.hpp"

#include "strfmt.hpp"

#include <cmath>
#include <stdexcept>

namespace laplab {

namespace {
int default_grid(int m) { return std::max(720, 16 * (m + 1)); }
}  // namespace

// ---------------------------------------------------------------------------
// Symbol
// ---------------------------------------------------------------------------

Symbol::Symbol(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty() || c_.size() % 2 == 0)
    throw std::invalid_argument("Symbol: coefficient vector must have odd size");
  m_ = static_cast<int>(c_.size() / 2);
}

Symbol Symbol::monomial(int n, Complex a) {
  int m = std::abs(n);
  std::vector<Complex> c(2 * m + 1, Complex(0, 0));
  c[n + m] = a;
  return Symbol(std::move(c));
}

Complex Symbol::coeff(int n) const {
  if (n < -m_ || n > m_) return Complex(0, 0);
  return c_[n + m_];
}

Complex Symbol::eval(double theta) const {
  Complex out(0, 0);
  for (int n = -m_; n <= m_; ++n)
    out += c_[n + m_] * std::polar(1.0, n * theta);
  return out;
}

Symbol Symbol::derivative() const {
  std::vector<Complex> c(c_.size());
  for (int n = -m_; n <= m_; ++n) c[n + m_] = Complex(0, n) * c_[n + m_];
  return Symbol(std::move(c));
}

Symbol Symbol::conjugate() const {
  std::vector<Complex> c(c_.size());
  for (int n = -m_; n <= m_; ++n) c[n + m_] = std::conj(c_[m_ - n]);
  return Symbol(std::move(c));
}

Symbol Symbol::trimmed(double tol) const {
  int m = 0;
  for (int n = -m_; n <= m_; ++n)
    if (std::abs(c_[n + m_]) > tol) m = std::max(m, std::abs(n));
  std::vector<Complex> c(2 * m + 1);
  for (int n = -m; n <= m; ++n) c[n + m] = c_[n + m_];
  return Symbol(std::move(c));
}

double Symbol::max_unimodular_defect(int grid_points) const {
  int g = grid_points > 0 ? grid_points : default_grid(m_);
  double worst = 0.0;
  for (int j = 0; j < g; ++j) {
    double t = 2.0 * kPi * j / g;
    worst = std::max(worst, std::abs(std::abs(eval(t)) - 1.0));
  }
  return worst;
}

double Symbol::max_imag_defect(int grid_points) const {
  int g = grid_points > 0 ? grid_points : default_grid(m_);
  double worst = 0.0;
  for (int j = 0; j < g; ++j) {
    double t = 2.0 * kPi * j / g;
    worst = std::max(worst, std::abs(std::imag(eval(t))));
  }
  return worst;
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  int m = std::max(a.m_, b.m_);
  std::vector<Complex> c(2 * m + 1, Complex(0, 0));
  for (int n = -m; n <= m; ++n) c[n + m] = a.coeff(n) + b.coeff(n);
  return Symbol(std::move(c));
}

Symbol operator-(const Symbol& a, const Symbol& b) {
  return a + Complex(-1.0, 0.0) * b;
}

Symbol operator*(const Symbol& a, const Symbol& b) {
  int m = a.m_ + b.m_;
  std::vector<Complex> c(2 * m + 1, Complex(0, 0));
  for (int p = -a.m_; p <= a.m_; ++p)
    for (int q = -b.m_; q <= b.m_; ++q)
      c[p + q + m] += a.c_[p + a.m_] * b.c_[q + b.m_];
  return Symbol(std::move(c));
}

Symbol operator*(Complex s, const Symbol& a) {
  std::vector<Complex> c = a.c_;
  for (auto& v : c) v *= s;
  return Symbol(std::move(c));
}

Symbol Symbol::from_samples(const std::function<Complex(double)>& f, int m,
                            int grid_points) {
  if (m < 0) throw std::invalid_argument("Symbol::from_samples: negative order");
  if (grid_points < 2 * m + 2)
    throw std::invalid_argument("Symbol::from_samples: grid too coarse for order");
  std::vector<Complex> samples(grid_points);
  for (int j = 0; j < grid_points; ++j)
    samples[j] = f(2.0 * kPi * j / grid_points);
  std::vector<Complex> c(2 * m + 1, Complex(0, 0));
  for (int n = -m; n <= m; ++n) {
    Complex acc(0, 0);
    for (int j = 0; j < grid_points; ++j)
      acc += samples[j] * std::polar(1.0, -n * (2.0 * kPi * j / grid_points));
    c[n + m] = acc / static_cast<double>(grid_points);
  }
  return Symbol(std::move(c));
}

Symbol velocity_symbol(const Symbol& f) {
  Symbol g = Complex(0, 1) * (f * f.derivative().conjugate());
  // enforce the real-valuedness that holds exactly for unimodular f
  int m = g.half_order();
  std::vector<Complex> c(2 * m + 1);
  for (int n = -m; n <= m; ++n)
    c[n + m] = (g.coeff(n) + std::conj(g.coeff(-n))) / 2.0;
  return Symbol(std::move(c)).trimmed();
}

Symbol unimodular_symbol(int winding, const std::vector<Harmonic>& harmonics,
                         int m) {
  for (const auto& h : harmonics)
    if (h.k <= 0)
      throw std::invalid_argument("unimodular_symbol: harmonic index must be positive");
  auto f = [winding, &harmonics](double t) {
    double phase = winding * t;
    for (const auto& h : harmonics) phase += h.amp * std::cos(h.k * t + h.phase);
    return std::polar(1.0, phase);
  };
  int grid = std::max(4096, 8 * (m + std::abs(winding) + 1));
  return Symbol::from_samples(f, m, grid);
}

// ---------------------------------------------------------------------------
// MatrixSymbol
// ---------------------------------------------------------------------------

MatrixSymbol::MatrixSymbol(int block_dim, int half_order)
    : d_(block_dim), m_(half_order) {
  if (d_ < 1 || m_ < 0)
    throw std::invalid_argument("MatrixSymbol: bad dimensions");
  c_.assign(2 * m_ + 1, Matrix::Zero(d_, d_));
}

MatrixSymbol MatrixSymbol::constant(const Matrix& c0) {
  if (c0.rows() != c0.cols())
    throw std::invalid_argument("MatrixSymbol::constant: block is not square");
  MatrixSymbol s(static_cast<int>(c0.rows()), 0);
  s.c_[0] = c0;
  return s;
}

Matrix MatrixSymbol::coeff(int n) const {
  if (n < -m_ || n > m_) return Matrix::Zero(d_, d_);
  return c_[n + m_];
}

Matrix& MatrixSymbol::coeff_ref(int n) {
  if (n < -m_ || n > m_)
    throw std::invalid_argument("MatrixSymbol: coefficient index outside band");
  return c_[n + m_];
}

Matrix MatrixSymbol::eval(double theta) const {
  Matrix out = Matrix::Zero(d_, d_);
  for (int n = -m_; n <= m_; ++n)
    out += c_[n + m_] * std::polar(1.0, n * theta);
  return out;
}

double MatrixSymbol::max_unitary_defect(int grid_points) const {
  int g = grid_points > 0 ? grid_points : default_grid(m_);
  double worst = 0.0;
  Matrix id = Matrix::Identity(d_, d_);
  for (int j = 0; j < g; ++j) {
    Matrix v = eval(2.0 * kPi * j / g);
    worst = std::max(worst, op_norm(v.adjoint() * v - id));
  }
  return worst;
}

double MatrixSymbol::max_projection_defect(int grid_points) const {
  int g = grid_points > 0 ? grid_points : default_grid(m_);
  double worst = 0.0;
  for (int j = 0; j < g; ++j) {
    Matrix p = eval(2.0 * kPi * j / g);
    worst = std::max(worst, op_norm(p * p - p));
    worst = std::max(worst, op_norm(p - p.adjoint()));
  }
  return worst;
}

MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (a.d_ != b.d_)
    throw std::invalid_argument("MatrixSymbol: block dimension mismatch");
  MatrixSymbol out(a.d_, a.m_ + b.m_);
  for (int p = -a.m_; p <= a.m_; ++p)
    for (int q = -b.m_; q <= b.m_; ++q)
      out.c_[p + q + out.m_] += a.c_[p + a.m_] * b.c_[q + b.m_];
  return out;
}

// ---------------------------------------------------------------------------
// circulant truncations
// ---------------------------------------------------------------------------

namespace {
void require_no_alias(int band, int sites, const char* fn) {
  if (sites < 2 * band + 1)
    throw std::invalid_argument(
        detail::strf("%s: window with %d sites aliases a band of order %d", fn,
                     sites, band));
}
}  // namespace

Matrix circulant(const Symbol& f, const Window& w) {
  if (w.kind != WindowKind::bilateral || w.internal_dim != 1)
    throw std::invalid_argument("circulant: expected a scalar bilateral window");
  const int L = w.sites();
  require_no_alias(f.half_order(), L, "circulant");
  std::vector<Complex> kernel(L, Complex(0, 0));
  for (int n = -f.half_order(); n <= f.half_order(); ++n)
    kernel[((n % L) + L) % L] += f.coeff(n);
  Matrix out(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) out(i, j) = kernel[((i - j) % L + L) % L];
  return out;
}

Matrix block_circulant(const MatrixSymbol& f, const Window& w) {
  if (w.kind != WindowKind::bilateral || w.internal_dim != f.block_dim())
    throw std::invalid_argument(
        "block_circulant: window internal dimension does not match the symbol");
  const int L = w.sites();
  const int d = f.block_dim();
  require_no_alias(f.half_order(), L, "block_circulant");
  std::vector<Matrix> kernel(L, Matrix::Zero(d, d));
  for (int n = -f.half_order(); n <= f.half_order(); ++n)
    kernel[((n % L) + L) % L] += f.coeff(n);
  Matrix out = Matrix::Zero(L * d, L * d);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      out.block(i * d, j * d, d, d) = kernel[((i - j) % L + L) % L];
  return out;
}

}  // namespace laplab
