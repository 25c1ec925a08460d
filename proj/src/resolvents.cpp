#include "laplab/resolvents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "laplab/rng.hpp"
#include "strfmt.hpp"

namespace laplab {

namespace {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

double wrap_angle(double x) {
  double m = std::fmod(x, 2.0 * kPi);
  if (m < 0.0) m += 2.0 * kPi;
  return m;
}

// 1 - z V*, with a singularity diagnostic when |z| leaves the open disk.
Matrix inverse_system(const Matrix& v, Complex z, const char* who) {
  const int n = static_cast<int>(v.rows());
  Matrix t = Matrix::Identity(n, n) - z * v.adjoint();
  if (std::abs(z) >= 1.0) {
    Eigen::ComplexEigenSolver<Matrix> es(v.adjoint());
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      nearest = std::min(nearest, std::abs(1.0 - z * es.eigenvalues()[i]));
    if (nearest < 1e-10)
      throw std::invalid_argument(detail::strf(
          "%s: resolvent undefined at z = %.9g%+.9gi (min |1 - z lambda| = %.3e)",
          who, z.real(), z.imag(), nearest));
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// grids
// ---------------------------------------------------------------------------

void validate_grid(const ScanGrid& grid) {
  if (grid.radii.empty() || grid.angles.empty())
    throw std::invalid_argument("scan grid: radii and angles must be non-empty");
  double prev = 0.0;
  for (double r : grid.radii) {
    if (!(r > prev && r < 1.0))
      throw std::invalid_argument(
          "scan grid: radii must be strictly increasing inside (0, 1)");
    prev = r;
  }
  for (double th : grid.angles)
    if (!(th >= 0.0 && th < 2.0 * kPi))
      throw std::invalid_argument("scan grid: angles must lie in [0, 2*pi)");
}

ScanGrid full_circle_grid(std::vector<double> radii, int angular_points) {
  if (angular_points < 1)
    throw std::invalid_argument("full_circle_grid: need at least one angle");
  ScanGrid g;
  g.radii = std::move(radii);
  for (int k = 0; k < angular_points; ++k)
    g.angles.push_back(2.0 * kPi * k / angular_points);
  validate_grid(g);
  return g;
}

ScanGrid arc_grid(std::vector<double> radii, const Arc& arc, int angular_points) {
  if (angular_points < 1)
    throw std::invalid_argument("arc_grid: need at least one angle");
  ScanGrid g;
  g.radii = std::move(radii);
  if (angular_points == 1) {
    g.angles.push_back(wrap_angle(arc.lo + arc.span() / 2.0));
  } else {
    for (int k = 0; k < angular_points; ++k)
      g.angles.push_back(
          wrap_angle(arc.lo + arc.span() * k / (angular_points - 1)));
  }
  validate_grid(g);
  return g;
}

// ---------------------------------------------------------------------------
// resolvents
// ---------------------------------------------------------------------------

Matrix bare_resolvent(const Matrix& v, Complex z) {
  Matrix t = inverse_system(v, z, "bare_resolvent");
  return t.partialPivLu().solve(Matrix::Identity(v.rows(), v.cols()));
}

WeightedResolvent weighted_resolvent(const TruncatedOperator& v,
                                     const TruncatedOperator& a, double s,
                                     Complex z) {
  if (!(v.window == a.window))
    throw std::invalid_argument("weighted_resolvent: operator windows differ");
  Matrix w = weight(a.mat, s);
  Matrix t = inverse_system(v.mat, z, "weighted_resolvent");
  auto lu = t.partialPivLu();
  Matrix x = lu.solve(w);  // x = (1 - zV*)^-1 <A>^-s
  WeightedResolvent out{TruncatedOperator(w * x, v.window, v.boundary), 0.0,
                        0.0, 0.0};
  out.norm = op_norm(out.F.mat);
  out.residual = op_norm(t * x - w);
  Matrix g = lu.solve(Matrix::Identity(t.rows(), t.cols()));
  out.condition = op_norm(t) * op_norm(g);
  return out;
}

// ---------------------------------------------------------------------------
// scans
// ---------------------------------------------------------------------------

namespace {

ScanResult run_scan(const Model& m, double s, const ScanGrid& grid,
                    double threshold, const Matrix* localizer,
                    const char* who) {
  validate_grid(grid);
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument(detail::strf("%s: s must lie in (0, 1]", who));
  if (!m.has_A())
    throw std::invalid_argument(
        detail::strf("%s: model lacks a conjugate operator", who));
  const int n = m.dim();
  Matrix w = weight(m.A->mat, s);
  Matrix id = Matrix::Identity(n, n);

  ScanResult res;
  res.s = s;
  res.radii = grid.radii;
  for (double r : grid.radii) {
    double rmax = 0.0;
    for (double th : grid.angles) {
      ScanPoint pt;
      pt.radius = r;
      pt.angle = th;
      pt.z = std::polar(r, th);
      try {
        Matrix t = id - pt.z * m.V.mat.adjoint();
        Matrix g = t.partialPivLu().solve(id);
        pt.unweighted_norm = op_norm(g);
        pt.weighted_norm = op_norm(w * g * w);
        if (localizer)
          pt.localized_norm = op_norm(w * (*localizer * g * *localizer) * w);
      } catch (const std::exception& ex) {
        pt.solver_ok = false;
        pt.note = ex.what();
      }
      if (pt.solver_ok) {
        double verdict = localizer ? *pt.localized_norm : pt.weighted_norm;
        rmax = std::max(rmax, verdict);
      }
      res.points.push_back(std::move(pt));
    }
    res.per_radius_max.push_back(rmax);
  }

  res.sup = *std::max_element(res.per_radius_max.begin(),
                              res.per_radius_max.end());
  const auto& prm = res.per_radius_max;
  if (prm.size() >= 2) {
    double prev = prm[prm.size() - 2];
    res.stabilization_ratio = prev > 0.0 ? prm.back() / prev : 1.0;
    res.divergence_ratio = prm.front() > 0.0 ? prm.back() / prm.front() : 1.0;
  }
  res.bounded = res.stabilization_ratio <= threshold;
  return res;
}

}  // namespace

ScanResult lap_scan(const Model& m, double s, const ScanGrid& grid,
                    double stabilization_threshold) {
  return run_scan(m, s, grid, stabilization_threshold, nullptr, "lap_scan");
}

ScanResult localized_scan(const Model& m, double s,
                          const std::function<double(double)>& phi,
                          const ScanGrid& grid,
                          double stabilization_threshold) {
  if (!m.has_U())
    throw std::invalid_argument("localized_scan: model lacks a unitary factor");
  Matrix loc = unitary_calculus(
      m.U->mat, [&phi](double th) { return Complex(phi(th), 0.0); });
  return run_scan(m, s, grid, stabilization_threshold, &loc, "localized_scan");
}

// ---------------------------------------------------------------------------
// cutoff bound and disk positivity
// ---------------------------------------------------------------------------

CutoffBoundReport dilation_cutoff_bound(const Model& m,
                                        const std::vector<Complex>& zs,
                                        int vectors_per_z, std::uint64_t seed) {
  if (!m.has_U())
    throw std::invalid_argument(
        "dilation_cutoff_bound: model lacks a unitary factor");
  const int n = m.dim();
  Matrix id = Matrix::Identity(n, n);
  Matrix diff = m.U->mat.adjoint() - m.V.mat.adjoint();
  Rng rng(seed);
  CutoffBoundReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (Complex z : zs) {
    Matrix t = inverse_system(m.V.mat, z, "dilation_cutoff_bound");
    Matrix g0 = t.partialPivLu().solve(id);
    for (int k = 0; k < vectors_per_z; ++k) {
      Vector psi = rng.unit_vector(n);
      Vector gpsi = g0 * psi;
      double lhs = (diff * gpsi).squaredNorm();
      double rhs = 8.0 * psi.dot(gpsi).real();
      rep.max_violation = std::max(rep.max_violation, lhs - rhs);
      ++rep.samples;
    }
  }
  if (rep.samples == 0) rep.max_violation = 0.0;
  rep.ok = rep.max_violation <= 1e-9;
  return rep;
}

PzReport pz_positivity(const TruncatedOperator& v, Complex z) {
  if (std::abs(z) >= 1.0)
    throw std::invalid_argument("pz_positivity: z must lie inside the open disk");
  const int n = v.dim();
  Matrix id = Matrix::Identity(n, n);
  Matrix t = id - z * v.mat.adjoint();
  Matrix g = t.partialPivLu().solve(id);
  Matrix p = g + g.adjoint() - id;
  PzReport rep;
  rep.min_eig = min_eig(hermitian_part(p));
  Matrix core = id - std::norm(z) * (v.mat.adjoint() * v.mat);
  rep.factor_residual = op_norm(p - g * core * g.adjoint());
  return rep;
}

// ---------------------------------------------------------------------------
// deformed resolvents
// ---------------------------------------------------------------------------

double admissibility(double a0, double eps, Complex z) {
  return 1.0 - std::norm(z) + a0 * eps * std::norm(z);
}

DeformedResolvent deformed_resolvent(const RegularizedFamily& fam, Complex z,
                                     double eps, double a0) {
  double d = admissibility(a0, eps, z);
  if (!(d > 0.0))
    throw std::invalid_argument(detail::strf(
        "deformed_resolvent: outside admissible region (d = %.3e)", d));
  DeformedResolvent out;
  out.snapshot = fam.at(eps);
  const int n = static_cast<int>(out.snapshot.V_eps.rows());
  Matrix id = Matrix::Identity(n, n);
  Matrix t = id - z * out.snapshot.V_eps.adjoint();
  out.G = t.partialPivLu().solve(id);
  out.diag.d = d;
  out.diag.residual = op_norm(t * out.G - id);
  out.diag.g_norm = op_norm(out.G);
  out.diag.dg_norm = d * out.diag.g_norm;
  Matrix vv = out.snapshot.V_eps * out.snapshot.V_eps.adjoint();
  out.diag.mmt_slack = min_eig(hermitian_part(id - std::norm(z) * vv)) - d;
  return out;
}

double mmt0_slack(const Model& m, Complex z, double eps, double a0, double a1,
                  double d0, int guard) {
  if (!(d0 > 0.0))
    throw std::invalid_argument("mmt0_slack: d0 must be positive");
  RegularizedFamily fam = c2_family(m);
  FamilySnapshot snap = fam.at(eps);
  double d = admissibility(a0, eps, z);
  const int n = m.dim();
  Matrix id = Matrix::Identity(n, n);
  Matrix t = id - z * snap.V_eps.adjoint();
  double corr = 3.0 * kPi * kPi * a1 / (2.0 * d0 * d0) * eps * std::abs(z);
  Matrix form = id - std::norm(z) * (snap.V_eps * snap.V_eps.adjoint()) +
                corr * (t.adjoint() * t) - d * id;
  Matrix kept = drop_guard_sites(hermitian_part(form), m.window(), guard);
  return min_eig(kept);
}

// ---------------------------------------------------------------------------
// convergence of the deformation
// ---------------------------------------------------------------------------

DeformationTrace convergence_study(const RegularizedFamily& fam,
                                   const Matrix& a_op, double s, double r,
                                   double a0, const ConvergenceOptions& opts) {
  if (!(s > 0.5 && s <= 1.0))
    throw std::invalid_argument("convergence_study: s must lie in (1/2, 1]");
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("convergence_study: r must lie in (0, 1)");
  if (!(a0 > 0.0))
    throw std::invalid_argument("convergence_study: a0 must be positive");
  if (opts.epsilons.empty())
    throw std::invalid_argument("convergence_study: empty epsilon sequence");
  for (double e : opts.epsilons)
    if (e < 0.0)
      throw std::invalid_argument("convergence_study: negative epsilon");

  const int n = static_cast<int>(fam.V.rows());
  Matrix id = Matrix::Identity(n, n);
  Matrix w0 = weight(a_op, s);

  std::vector<double> angles;
  if (opts.angles) {
    for (int k = 0; k < opts.angular_points; ++k)
      angles.push_back(wrap_angle(
          opts.angles->lo +
          opts.angles->span() *
              (opts.angular_points == 1
                   ? 0.5
                   : double(k) / (opts.angular_points - 1))));
  } else {
    for (int k = 0; k < opts.angular_points; ++k)
      angles.push_back(2.0 * kPi * k / opts.angular_points);
  }

  auto f_weighted = [&](double eps, Complex z) {
    FamilySnapshot snap = fam.at(eps);
    Matrix t = id - z * snap.V_eps.adjoint();
    Matrix g = t.partialPivLu().solve(id);
    Matrix we = deformed_weight(a_op, s, eps);
    return std::make_pair(Matrix(we * g * we), g);
  };

  DeformationTrace trace;
  trace.s = s;
  trace.r = r;
  trace.a0 = a0;
  trace.b = fam.b;
  trace.epsilons = opts.epsilons;

  Rng rng(derive_seed(opts.seed, "convergence form vectors"));
  std::vector<Vector> probes;
  for (int k = 0; k < opts.form_vectors; ++k) probes.push_back(rng.unit_vector(n));

  for (double eps : opts.epsilons) {
    double sup = 0.0;
    for (double th : angles) {
      Complex z = std::polar(r, th);
      Matrix g0 = bare_resolvent(fam.V, z);
      Matrix fs = w0 * g0 * w0;

      DeformationPoint pt;
      pt.eps = eps;
      pt.z = z;
      pt.d_value = admissibility(a0, eps, z);
      auto [feps, g] = f_weighted(eps, z);
      pt.g_norm = op_norm(g);
      pt.dg_norm = pt.d_value * pt.g_norm;
      pt.f_eps_norm = op_norm(feps);
      pt.f_diff = op_norm(feps - fs);
      sup = std::max(sup, pt.f_diff);

      if (eps > 0.0) {
        double h = eps / 10.0;
        Matrix fplus = f_weighted(eps + h, z).first;
        Matrix fminus = f_weighted(eps - h, z).first;
        Matrix deriv = (fplus - fminus) / (2.0 * h);
        pt.fd_norm = op_norm(deriv);
        FamilySnapshot snap = fam.at(eps);
        double h1 = 2.0 * std::sqrt(2.0) * (2.0 - s) * std::pow(eps, s - 1.0) /
                    (std::sqrt(a0 * eps) * r);
        double h2 = 2.0 * op_norm(snap.Qcal) / (a0 * r * r * eps);
        pt.h_bound = h1 * std::sqrt(pt.f_eps_norm) + h2 * pt.f_eps_norm;
        double worst = -std::numeric_limits<double>::infinity();
        for (const Vector& phi : probes) {
          double lhs = std::abs(phi.dot(deriv * phi));
          double quad = std::abs(phi.dot(feps * phi));
          double rhs = h1 * std::sqrt(quad) + h2 * quad;
          worst = std::max(worst, lhs - rhs);
        }
        pt.form_slack = worst;
      }
      trace.points.push_back(std::move(pt));
    }
    trace.sup_diff.push_back(sup);
  }

  for (size_t i = 1; i < trace.sup_diff.size(); ++i) {
    if (trace.sup_diff[i] > trace.sup_diff[i - 1]) trace.decreasing = false;
    if (trace.sup_diff[i] > 1.01 * trace.sup_diff[i - 1])
      trace.warn_nonmonotone = true;
  }
  trace.final_over_initial = trace.sup_diff.front() > 0.0
                                 ? trace.sup_diff.back() / trace.sup_diff.front()
                                 : 0.0;

  // measured C0 = sup d(eps, z) ||G_eps(z)|| over a sample of the region,
  // folded together with every point the trace itself visited
  double c0 = 0.0;
  for (const DeformationPoint& pt : trace.points)
    c0 = std::max(c0, pt.dg_norm);
  std::vector<double> eps_sample = opts.epsilons;
  eps_sample.push_back(0.0);
  for (double eps : eps_sample) {
    FamilySnapshot snap = fam.at(eps);
    for (int i = 0; i < opts.c0_radial; ++i) {
      double rr = 0.1 + (0.95 - 0.1) * i / std::max(opts.c0_radial - 1, 1);
      for (int k = 0; k < opts.c0_angular; ++k) {
        Complex z = std::polar(rr, 2.0 * kPi * k / opts.c0_angular);
        Matrix t = id - z * snap.V_eps.adjoint();
        Matrix g = t.partialPivLu().solve(id);
        c0 = std::max(c0, admissibility(a0, eps, z) * op_norm(g));
      }
    }
  }

  // interior-z deviation against the first-order theory bound
  Complex zi = opts.interior_z;
  Matrix g0i = bare_resolvent(fam.V, zi);
  std::vector<std::pair<double, double>> interior;  // (eps, ||G_eps - G_0||)
  for (double eps : opts.epsilons) {
    if (eps == 0.0) continue;
    FamilySnapshot snap = fam.at(eps);
    Matrix t = id - zi * snap.V_eps.adjoint();
    Matrix g = t.partialPivLu().solve(id);
    c0 = std::max(c0, admissibility(a0, eps, zi) * op_norm(g));
    interior.emplace_back(eps, op_norm(g - g0i));
  }
  trace.c0 = c0;
  double worst_ratio = 0.0;
  for (auto [eps, diff] : interior) {
    double bound = trace.c0 * fam.b * eps /
                   ((1.0 + std::abs(zi)) * std::pow(1.0 - std::abs(zi), 2.0));
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, diff / bound);
  }
  trace.interior_bound_worst = worst_ratio;
  return trace;
}

}  // namespace laplab
