#pragma once

#include "laplab/operators.hpp"

namespace laplab {

// Trigonometric polynomial f(theta) = sum_{n=-M..M} c_n e^{i n theta}.
// Coefficients are stored densely over the symmetric band.
class Symbol {
 public:
  Symbol() : m_(0), c_(1, Complex(0, 0)) {}
  explicit Symbol(std::vector<Complex> coeffs);  // size 2M+1, n = -M..M
  static Symbol monomial(int n, Complex a = Complex(1.0, 0.0));

  int half_order() const { return m_; }
  Complex coeff(int n) const;
  Complex eval(double theta) const;

  Symbol derivative() const;   // d/dtheta
  Symbol conjugate() const;    // pointwise complex conjugate on the circle
  Symbol trimmed(double tol = 1e-14) const;

  // max over a uniform grid of | |f| - 1 | resp. |Im f|
  double max_unimodular_defect(int grid_points = 0) const;
  double max_imag_defect(int grid_points = 0) const;

  friend Symbol operator+(const Symbol& a, const Symbol& b);
  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator*(const Symbol& a, const Symbol& b);
  friend Symbol operator*(Complex s, const Symbol& a);

  // Fourier truncation of a sampled function.
  static Symbol from_samples(const std::function<Complex(double)>& f, int m,
                             int grid_points = 4096);

 private:
  int m_;
  std::vector<Complex> c_;  // index n + m_
};

// g = i f conj(f'), the angular velocity of a unitary symbol.  The returned
// coefficients are symmetrized so g is exactly real on the circle.
Symbol velocity_symbol(const Symbol& f);

// Truncation of exp(i(w theta + phi(theta))) to band m, where phi(theta) =
// sum_k amp_k cos(k theta + phase_k).  Exactly unimodular symbols of finite
// band are monomials, so anything with a nontrivial phi only approximates
// unimodularity; the truncation tail decays factorially in m and the caller
// can read it off max_unimodular_defect.
struct Harmonic {
  int k = 1;
  double amp = 0.0;
  double phase = 0.0;
};
Symbol unimodular_symbol(int winding, const std::vector<Harmonic>& harmonics,
                         int m);

// Block-valued trig polynomial sum_{n=-M..M} C_n e^{i n theta}.
class MatrixSymbol {
 public:
  MatrixSymbol() : d_(1), m_(0), c_(1, Matrix::Zero(1, 1)) {}
  MatrixSymbol(int block_dim, int half_order);
  static MatrixSymbol constant(const Matrix& c0);

  int block_dim() const { return d_; }
  int half_order() const { return m_; }
  Matrix coeff(int n) const;
  Matrix& coeff_ref(int n);
  Matrix eval(double theta) const;

  double max_unitary_defect(int grid_points = 0) const;
  double max_projection_defect(int grid_points = 0) const;

  friend MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b);

 private:
  int d_;
  int m_;
  std::vector<Matrix> c_;  // index n + m_
};

// Periodic truncation of the convolution operator with kernel c_{x-y} on a
// bilateral window; indices wrap mod the window size.  Throws when the band
// would alias.
Matrix circulant(const Symbol& f, const Window& w);
Matrix block_circulant(const MatrixSymbol& f, const Window& w);

}  // namespace laplab
