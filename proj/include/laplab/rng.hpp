#pragma once

#include "laplab/operators.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace laplab {

// Deterministic random source.  Gaussian draws go through a fixed Box-Muller
// transform instead of std::normal_distribution so that streams are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  double uniform() {  // in [0, 1)
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * kPi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Complex gaussian_complex() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im);
  }

  Vector vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian_complex();
    return v;
  }

  Vector unit_vector(int n) {
    Vector v = vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {  // essentially impossible, but stay safe
      v = vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

  Matrix matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gaussian_complex();
    return m;
  }

  // Haar-distributed unitary via QR of a Gaussian matrix with the standard
  // phase fix on the diagonal of R.
  Matrix unitary(int n) {
    Matrix g = matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
      Complex d = r(i, i);
      double m = std::abs(d);
      q.col(i) *= (m > 0 ? d / m : Complex(1.0, 0.0));
    }
    return q;
  }

  // Random contraction: Gaussian matrix scaled a touch inside the unit ball.
  Matrix contraction(int n, double radius = 0.95) {
    Matrix g = matrix(n, n);
    double nrm = op_norm(g);
    if (nrm < 1e-12) return Matrix::Zero(n, n);
    return (radius * uniform(0.2, 1.0) / nrm) * g;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable FNV-1a hash of a label, used to give every check its own stream
// derived from the scenario seed.
inline std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return seed ^ label_hash(label);
}

}  // namespace laplab
