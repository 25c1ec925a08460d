#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <laplab/checks.hpp>
#include <laplab/models.hpp>
#include <laplab/resolvents.hpp>
#include <laplab/rng.hpp>
#include <laplab/symbols.hpp>

#include <cmath>

using namespace laplab;
using doctest::Approx;

namespace {

TruncatedOperator wrap_op(const Matrix& m) {
  Window w{WindowKind::unilateral, static_cast<int>(m.rows()) - 1, 1};
  return TruncatedOperator(m, w);
}

const ScanPoint& point_at(const ScanResult& res, double r, double th) {
  for (const ScanPoint& pt : res.points)
    if (pt.radius == r && pt.angle == th) return pt;
  throw std::logic_error("point_at: grid point missing");
}

}  // namespace

TEST_CASE("scan grids validate and sample") {
  ScanGrid g = full_circle_grid({0.5, 0.9}, 8);
  CHECK(g.angles.size() == 8);
  CHECK(g.angles[2] == Approx(kPi / 2));

  ScanGrid a = arc_grid({0.5}, Arc{kPi / 4, 3 * kPi / 4}, 5);
  CHECK(a.angles.front() == Approx(kPi / 4));
  CHECK(a.angles.back() == Approx(3 * kPi / 4));

  CHECK_THROWS_AS(full_circle_grid({0.9, 0.5}, 4), std::invalid_argument);
  CHECK_THROWS_AS(full_circle_grid({1.0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(full_circle_grid({0.5}, 0), std::invalid_argument);
  ScanGrid bad{{0.5}, {-0.1}};
  CHECK_THROWS_AS(validate_grid(bad), std::invalid_argument);
  ScanGrid empty{{}, {0.0}};
  CHECK_THROWS_AS(validate_grid(empty), std::invalid_argument);
}

TEST_CASE("weighted resolvent agrees with direct inversion") {
  Model m = build_fundamental(8);

  // z = 0 collapses to the squared weight, whose top eigenvalue sits at n = 0
  WeightedResolvent at0 = weighted_resolvent(m.V, *m.A, 0.7, Complex(0, 0));
  Matrix w = weight(m.A->mat, 0.7);
  CHECK(op_norm(at0.F.mat - w * w) <= 1e-12);
  CHECK(at0.norm == Approx(1.0).epsilon(1e-12));
  CHECK(at0.residual <= 1e-12);

  // V = 0 keeps that shape at every z
  TruncatedOperator vz(Matrix::Zero(m.dim(), m.dim()), m.window(),
                       m.V.boundary);
  WeightedResolvent zero =
      weighted_resolvent(vz, *m.A, 0.7, Complex(0.7, 0.2));
  CHECK(op_norm(zero.F.mat - w * w) <= 1e-12);

  // random contraction against the explicit inverse
  Rng rng(17);
  Matrix v = rng.contraction(32);
  Matrix a = Matrix::Zero(32, 32);
  for (int i = 0; i < 32; ++i) a(i, i) = Complex(i, 0);
  Complex z = std::polar(0.9, 1.1);
  WeightedResolvent got =
      weighted_resolvent(wrap_op(v), wrap_op(a), 0.7, z);
  Matrix wa = weight(a, 0.7);
  Matrix oracle =
      wa *
      (Matrix::Identity(32, 32) - z * v.adjoint()).inverse() * wa;
  CHECK(op_norm(got.F.mat - oracle) <= 1e-9);
  CHECK(got.residual <= 1e-9);
  CHECK(got.condition >= 1.0);

  // windows must agree
  Window w5{WindowKind::unilateral, 4, 1};
  TruncatedOperator small(Matrix::Identity(5, 5), w5);
  CHECK_THROWS_AS(weighted_resolvent(m.V, small, 0.7, z),
                  std::invalid_argument);
}

TEST_CASE("bare resolvent matches the Neumann series") {
  Rng rng(4);
  Matrix v = rng.contraction(24);
  Complex z = std::polar(0.5, 2.4);
  Matrix g = bare_resolvent(v, z);
  Matrix series = Matrix::Zero(24, 24);
  Matrix term = Matrix::Identity(24, 24);
  for (int k = 0; k < 80; ++k) {
    series += term;
    term = (z * v.adjoint()) * term;
  }
  CHECK(op_norm(g - series) <= 1e-10);

  // resolvent identity on a random pair of points
  Complex z2 = std::polar(0.8, 0.3);
  Matrix g2 = bare_resolvent(v, z2);
  CHECK(op_norm(g - g2 - (z - z2) * (g * v.adjoint() * g2)) <= 1e-9);

  // a unit-modulus eigenvalue of V* blocks z = 1
  CHECK_THROWS_AS(bare_resolvent(Matrix::Identity(4, 4), Complex(1.0, 0.0)),
                  std::invalid_argument);

  // |z| = 1 away from the spectrum is attempted and succeeds
  Model fs = build_forward_shift(16);
  Matrix edge = bare_resolvent(fs.V.mat, Complex(1.0, 0.0));
  Matrix tt = Matrix::Identity(17, 17) - fs.V.mat.adjoint();
  CHECK(op_norm(tt * edge - Matrix::Identity(17, 17)) <= 1e-10);
}

TEST_CASE("weighted scan of the hard cutoff shift") {
  Model m = build_forward_shift(256);
  std::vector<double> radii{0.9, 0.99, 0.999};

  ScanResult good = lap_scan(m, 0.7, full_circle_grid(radii, 4));
  CHECK(good.bounded);
  CHECK(good.stabilization_ratio == Approx(1.0994).epsilon(1e-3));
  CHECK(good.per_radius_max[0] == Approx(1.595011).epsilon(1e-5));
  CHECK(good.per_radius_max[1] == Approx(2.059022).epsilon(1e-5));
  CHECK(good.per_radius_max[2] == Approx(2.263632).epsilon(1e-5));
  CHECK(good.sup == Approx(2.263632).epsilon(1e-5));
  CHECK(good.divergence_ratio == Approx(1.4192).epsilon(1e-3));

  // below the s = 1/2 threshold the same scan diverges
  ScanResult bad = lap_scan(m, 0.3, full_circle_grid(radii, 4));
  CHECK(!bad.bounded);
  CHECK(bad.stabilization_ratio == Approx(1.7528).epsilon(1e-3));

  // the unweighted norm follows 1/(1-r) within a factor of two once the
  // radius respects the resolution of the truncation (1 - r >= 10/N)
  double delta = 10.0 / 256.0;
  std::vector<double> coupled{1.0 - 4.0 * delta, 1.0 - 2.0 * delta,
                              1.0 - delta};
  ScanResult grow = lap_scan(m, 0.7, full_circle_grid(coupled, 2));
  for (const ScanPoint& pt : grow.points) {
    double ratio = pt.unweighted_norm * (1.0 - pt.radius);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
  }

  CHECK_THROWS_AS(lap_scan(m, 1.2, full_circle_grid(radii, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(lap_scan(m, 0.0, full_circle_grid(radii, 2)),
                  std::invalid_argument);
}

TEST_CASE("weighted scan of the fundamental model stays bounded") {
  Model m = build_fundamental(48);
  ScanResult res = lap_scan(m, 0.7, full_circle_grid({0.9, 0.99, 0.999}, 8));
  CHECK(res.bounded);
  CHECK(res.sup < 10.0);
}

TEST_CASE("localized scan tames the flat point of the symbol") {
  // velocity symbol of exp(i(theta - sin theta)) vanishes at theta = 0, so
  // the plain weighted scan blows up near arg z = 0 while the scan localized
  // away from the flat point stays small over the full circle
  Symbol f = unimodular_symbol(1, {{1, 1.0, kPi / 2}}, 28);
  Model t = build_toeplitz(f, 48);
  std::vector<double> radii{0.9, 0.99, 0.999};

  auto bump = [](double th) {
    double x = (th - kPi / 2) / (kPi / 4);
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
  };

  ScanGrid flat{radii, {0.0}};
  ScanResult un = lap_scan(t, 0.7, flat);
  CHECK(!un.bounded);
  CHECK(un.sup > 300.0);

  ScanResult loc = localized_scan(t, 0.7, bump, full_circle_grid(radii, 8));
  CHECK(loc.bounded);
  CHECK(loc.sup < 5.0);
  const ScanPoint& edge = point_at(loc, 0.999, 0.0);
  REQUIRE(edge.localized_norm.has_value());
  CHECK(*edge.localized_norm < 1.0);

  // trivial localizer kills everything
  ScanResult off = localized_scan(t, 0.7, [](double) { return 0.0; },
                                  ScanGrid{{0.9}, {0.0, kPi}});
  for (const ScanPoint& pt : off.points)
    CHECK(*pt.localized_norm <= 1e-12);
}

TEST_CASE("cutoff difference bound holds on random vectors") {
  std::vector<Complex> zs;
  for (double r : {0.3, 0.6, 0.9, 0.97})
    for (int k = 0; k < 5; ++k) zs.push_back(std::polar(r, 2.0 * kPi * k / 5));

  Model m = build_fundamental(24);
  CutoffBoundReport rep = dilation_cutoff_bound(m, zs, 50, 7);
  CHECK(rep.samples == static_cast<int>(zs.size()) * 50);
  CHECK(rep.ok);
  CHECK(rep.max_violation <= 1e-9);

  Symbol f = unimodular_symbol(1, {{1, 0.25, 0.7}}, 8);
  Model t = build_toeplitz(f, 24);
  CHECK(dilation_cutoff_bound(t, zs, 20, 7).ok);

  // V = U makes the left side vanish identically
  Rng rng(9);
  Matrix u = rng.unitary(12);
  Window w{WindowKind::unilateral, 11, 1};
  Model mu;
  mu.family = ModelFamily::custom;
  mu.U = TruncatedOperator(u, w);
  mu.P = TruncatedOperator(Matrix::Identity(12, 12), w);
  mu.Q = mu.P;
  mu.V = *mu.U;
  CutoffBoundReport triv = dilation_cutoff_bound(mu, zs, 10, 7);
  CHECK(triv.ok);
  CHECK(triv.max_violation < 0.0);
}

TEST_CASE("real part of the doubled resolvent stays positive on the disk") {
  // z = 0 gives the identity
  Rng rng(12);
  Matrix v = rng.contraction(40);
  PzReport at0 = pz_positivity(wrap_op(v), Complex(0, 0));
  CHECK(at0.min_eig == Approx(1.0).epsilon(1e-12));
  CHECK(at0.factor_residual <= 1e-12);

  // randomized sweep: positivity plus the exact factorization
  for (int k = 0; k < 100; ++k) {
    Complex z = std::polar(rng.uniform(0.0, 0.999), rng.uniform(0.0, 2 * kPi));
    PzReport rep = pz_positivity(wrap_op(v), z);
    CHECK(rep.min_eig >= -1e-10);
    CHECK(rep.factor_residual <= 1e-9);
  }

  // unitary V at real z
  Matrix u = rng.unitary(20);
  PzReport ur = pz_positivity(wrap_op(u), Complex(0.9, 0.0));
  CHECK(ur.min_eig > 0.0);

  CHECK_THROWS_AS(pz_positivity(wrap_op(v), Complex(1.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("deformed resolvent diagnostics on the hard cutoff shift") {
  Model m = build_forward_shift(64);
  RegularizedFamily fam = c2_family(m);
  double a0 = global_positivity(m).a0;
  CHECK(a0 == Approx(1.0).epsilon(1e-10));

  // eps = 0 is the plain resolvent
  Complex z = std::polar(0.9, 0.7);
  DeformedResolvent d0 = deformed_resolvent(fam, z, 0.0, a0);
  CHECK(op_norm(d0.G - bare_resolvent(fam.V, z)) <= 1e-12);

  // quadratic form slack stays positive over a sample of the region
  for (double eps : {0.05, 0.1, 0.3}) {
    for (double r : {0.3, 0.7, 0.95, 0.999}) {
      for (int k = 0; k < 4; ++k) {
        Complex zz = std::polar(r, 2.0 * kPi * k / 4);
        DeformedResolvent dr = deformed_resolvent(fam, zz, eps, a0);
        CHECK(dr.diag.mmt_slack >= -1e-8);
        CHECK(dr.diag.residual <= 1e-9);
        CHECK(dr.diag.dg_norm <= dr.diag.d * dr.diag.g_norm + 1e-12);
      }
    }
  }

  // outside the admissible region
  CHECK_THROWS_AS(deformed_resolvent(fam, Complex(1.2, 0.0), 0.1, a0),
                  std::invalid_argument);

  // the a-priori inequality bounding ||G phi|| by the real part
  Rng rng(23);
  for (double eps : {0.1, 0.3}) {
    for (double r : {0.5, 0.9, 0.99}) {
      Complex zz = std::polar(r, 1.3);
      DeformedResolvent dr = deformed_resolvent(fam, zz, eps, a0);
      for (int k = 0; k < 10; ++k) {
        Vector phi = rng.unit_vector(m.dim());
        double lhs = (dr.G * phi).norm();
        double re = std::abs(phi.dot(dr.G * phi).real());
        double rhs =
            std::sqrt(2.0 * re / (a0 * eps * std::norm(zz))) + 1e-8;
        CHECK(lhs <= rhs);
        double lhs_adj = (dr.G.adjoint() * phi).norm();
        CHECK(lhs_adj <= rhs);
      }
    }
  }
}

TEST_CASE("deformed norm scale is stable under refinement") {
  // C0 = sup d(eps,z) ||G_eps(z)|| measured on a fixed sample of the
  // admissible region, compared across three truncation sizes
  std::vector<double> c0s;
  for (int n : {64, 128, 256}) {
    Model m = build_forward_shift(n);
    RegularizedFamily fam = c2_family(m);
    double c0 = 0.0;
    for (double eps : {0.0, 0.1, 0.3}) {
      for (double r : {0.3, 0.7, 0.95, 0.995}) {
        for (int k = 0; k < 4; ++k) {
          Complex z = std::polar(r, 2.0 * kPi * k / 4);
          DeformedResolvent dr = deformed_resolvent(fam, z, eps, 1.0);
          c0 = std::max(c0, dr.diag.dg_norm);
        }
      }
    }
    c0s.push_back(c0);
  }
  CHECK(c0s[0] < 10.0);
  CHECK(std::abs(c0s[1] - c0s[0]) / c0s[0] <= 0.2);
  CHECK(std::abs(c0s[2] - c0s[1]) / c0s[1] <= 0.2);
}

TEST_CASE("local quadratic form bound with the angular correction") {
  Model m = build_fundamental(24);
  Arc inner{kPi / 4, 3 * kPi / 4};
  Arc outer{kPi / 8, 7 * kPi / 8};
  LocalBoundsReport lb = local_lower_bounds(m, inner, outer);
  REQUIRE(lb.feasible);
  for (double eps : {0.05, 0.2}) {
    for (double r : {0.6, 0.9, 0.99}) {
      Complex z = std::polar(r, kPi / 2);
      CHECK(mmt0_slack(m, z, eps, lb.a0, lb.a1, lb.d0) >= -1e-8);
    }
  }

  Symbol f = unimodular_symbol(1, {{1, 0.25, 0.7}}, 8);
  Model t = build_toeplitz(f, 40);
  LocalBoundsReport tb = local_lower_bounds(t, inner, outer);
  REQUIRE(tb.feasible);
  for (double eps : {0.05, 0.2}) {
    for (double r : {0.6, 0.9, 0.99}) {
      Complex z = std::polar(r, kPi / 2);
      CHECK(mmt0_slack(t, z, eps, tb.a0, tb.a1, tb.d0) >= -1e-8);
    }
  }

  CHECK_THROWS_AS(mmt0_slack(m, Complex(0.5, 0.0), 0.1, 1.0, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("deformation convergence study on the hard cutoff shift") {
  Model m = build_forward_shift(128);
  RegularizedFamily fam = c2_family(m);
  double a0 = global_positivity(m).a0;

  DeformationTrace trace =
      convergence_study(fam, m.A->mat, 0.7, 0.9, a0);
  CHECK(trace.decreasing);
  CHECK(!trace.warn_nonmonotone);
  CHECK(trace.sup_diff.size() == 4);
  CHECK(trace.final_over_initial < 0.3);
  CHECK(trace.final_over_initial > 0.05);
  CHECK(trace.c0 > 0.0);
  CHECK(trace.interior_bound_worst <= 1.0);

  for (const DeformationPoint& pt : trace.points) {
    CHECK(pt.d_value > 0.0);
    CHECK(pt.f_eps_norm * pt.d_value <= trace.c0 + 1e-9);
    if (pt.eps > 0.0) {
      CHECK(pt.form_slack <= 1e-3);
      CHECK(pt.h_bound > 0.0);
    }
  }

  // eps = 0 rows reproduce the undeformed weighted resolvent exactly
  ConvergenceOptions zopt;
  zopt.epsilons = {0.1, 0.0};
  zopt.angular_points = 4;
  DeformationTrace ztrace =
      convergence_study(fam, m.A->mat, 0.7, 0.9, a0, zopt);
  int zero_rows = 0;
  for (const DeformationPoint& pt : ztrace.points)
    if (pt.eps == 0.0) {
      CHECK(pt.f_diff == 0.0);
      ++zero_rows;
    }
  CHECK(zero_rows == 4);

  CHECK_THROWS_AS(convergence_study(fam, m.A->mat, 0.4, 0.9, a0),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(fam, m.A->mat, 0.7, 1.1, a0),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(fam, m.A->mat, 0.7, 0.9, 0.0),
                  std::invalid_argument);
  ConvergenceOptions bad;
  bad.epsilons = {};
  CHECK_THROWS_AS(convergence_study(fam, m.A->mat, 0.7, 0.9, a0, bad),
                  std::invalid_argument);
}

TEST_CASE("doubled deformed resolvent factorization") {
  // H = 2G - 1 has Re H = G (1 - |z|^2 V_eps V_eps*) G* exactly
  Model m = build_forward_shift(48);
  RegularizedFamily fam = c2_family(m);
  for (double eps : {0.0, 0.15}) {
    FamilySnapshot snap = fam.at(eps);
    Matrix id = Matrix::Identity(m.dim(), m.dim());
    for (double r : {0.5, 0.95}) {
      Complex z = std::polar(r, 0.4);
      DeformedResolvent dr = deformed_resolvent(fam, z, eps, 1.0);
      Matrix h = 2.0 * dr.G - id;
      Matrix re_h = (h + h.adjoint()) / 2.0;
      Matrix core =
          id - std::norm(z) * (snap.V_eps.adjoint() * snap.V_eps);
      CHECK(op_norm(re_h - dr.G * core * dr.G.adjoint()) <= 1e-9);
    }
  }
}
