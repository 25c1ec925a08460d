#include "laplab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "laplab/checks.hpp"
#include "laplab/dynamics.hpp"
#include "laplab/resolvents.hpp"
#include "laplab/rng.hpp"
#include "laplab/version.hpp"
#include "strfmt.hpp"

namespace laplab {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw std::invalid_argument("scenario: " + path + ": " + what);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_field(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_field(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad_field(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], detail::strf("%s[%zu]", path.c_str(), i)));
  return out;
}

std::optional<Arc> as_arc(const json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) bad_field(path, "expected [lo, hi]");
  const double lo = as_number(j[0], path + "[0]");
  const double hi = as_number(j[1], path + "[1]");
  if (!(lo < hi)) bad_field(path, "needs lo < hi");
  return Arc{lo, hi};
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      bad_field(path + "." + it.key(), "unknown field");
}

struct CheckDef {
  const char* name;
  const char* description;
};

const std::vector<CheckDef>& check_table() {
  static const std::vector<CheckDef> defs = {
      {"hypotheses",
       "operator defects and commutator positivity, global with a local "
       "fallback"},
      {"mourre", "strict propagation estimate on a spectral window of U"},
      {"h4", "weak commutator smallness and the quadratic defect inequality"},
      {"virial", "rigidity of boundary eigenvectors of the truncation"},
      {"lap-scan",
       "weighted resolvent norms on radial grids approaching the circle"},
      {"localized-scan",
       "weighted scan with a spectral localizer inserted on both sides"},
      {"deformation",
       "convergence of the deformed weighted resolvent as eps -> 0"},
      {"dynamics", "orbit decay, correlation constant and smoothing sums"},
      {"dilation",
       "finite-depth unitary dilation and its correlation identity"},
  };
  return defs;
}

bool known_check(const std::string& name) {
  for (const auto& def : check_table())
    if (name == def.name) return true;
  return false;
}

ModelFamily family_from(const std::string& name, const std::string& path) {
  if (name == "fundamental") return ModelFamily::fundamental;
  if (name == "forward-shift") return ModelFamily::forward_shift;
  if (name == "toeplitz") return ModelFamily::toeplitz;
  if (name == "quantum-walk") return ModelFamily::quantum_walk;
  bad_field(path, "unknown family '" + name + "'");
}

const char* family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::fundamental: return "fundamental";
    case ModelFamily::forward_shift: return "forward-shift";
    case ModelFamily::toeplitz: return "toeplitz";
    case ModelFamily::quantum_walk: return "quantum-walk";
    default: return "custom";
  }
}

ScenarioModel parse_model(const json& j) {
  if (!j.is_object()) bad_field("model", "expected an object");
  reject_unknown(j,
                 {"family", "n", "winding", "harmonics", "band", "coin_angle",
                  "site_coin_angle"},
                 "model");
  if (!j.contains("family")) bad_field("model.family", "required");
  ScenarioModel m;
  m.family = family_from(as_string(j["family"], "model.family"),
                         "model.family");
  if (j.contains("n")) m.n = as_int(j["n"], "model.n");
  if (j.contains("winding")) m.winding = as_int(j["winding"], "model.winding");
  if (j.contains("band")) m.band = as_int(j["band"], "model.band");
  if (j.contains("coin_angle"))
    m.coin_angle = as_number(j["coin_angle"], "model.coin_angle");
  if (j.contains("site_coin_angle"))
    m.site_coin_angle =
        as_number(j["site_coin_angle"], "model.site_coin_angle");
  if (j.contains("harmonics")) {
    const json& hs = j["harmonics"];
    if (!hs.is_array()) bad_field("model.harmonics", "expected an array");
    for (size_t i = 0; i < hs.size(); ++i) {
      const std::string path = detail::strf("model.harmonics[%zu]", i);
      if (!hs[i].is_object()) bad_field(path, "expected an object");
      reject_unknown(hs[i], {"k", "amplitude", "phase"}, path);
      Harmonic h;
      if (hs[i].contains("k")) h.k = as_int(hs[i]["k"], path + ".k");
      if (hs[i].contains("amplitude"))
        h.amp = as_number(hs[i]["amplitude"], path + ".amplitude");
      if (hs[i].contains("phase"))
        h.phase = as_number(hs[i]["phase"], path + ".phase");
      m.harmonics.push_back(h);
    }
  }
  return m;
}

ScenarioSettings parse_settings(const json& j) {
  ScenarioSettings st;
  if (j.is_null()) return st;
  if (!j.is_object()) bad_field("settings", "expected an object");
  reject_unknown(
      j,
      {"s", "radii", "angular_points", "arc", "outer_arc", "epsilons",
       "interior_radius", "stabilization_threshold", "decrease_threshold",
       "expect", "localized_expect", "localizer_center", "localizer_width",
       "dilation_depth", "horizon", "seed", "a0", "mourre_a", "defect_tol",
       "imw_tol", "virial_tol", "dilation_unitarity_tol",
       "dilation_compression_tol", "correlation_tol"},
      "settings");
  const std::string p = "settings.";
  if (j.contains("s")) st.s = as_number(j["s"], p + "s");
  if (j.contains("radii")) st.radii = as_number_list(j["radii"], p + "radii");
  if (j.contains("angular_points"))
    st.angular_points = as_int(j["angular_points"], p + "angular_points");
  if (j.contains("arc")) st.arc = as_arc(j["arc"], p + "arc");
  if (j.contains("outer_arc"))
    st.outer_arc = as_arc(j["outer_arc"], p + "outer_arc");
  if (j.contains("epsilons"))
    st.epsilons = as_number_list(j["epsilons"], p + "epsilons");
  if (j.contains("interior_radius"))
    st.interior_radius = as_number(j["interior_radius"], p + "interior_radius");
  if (j.contains("stabilization_threshold"))
    st.stabilization_threshold =
        as_number(j["stabilization_threshold"], p + "stabilization_threshold");
  if (j.contains("decrease_threshold"))
    st.decrease_threshold =
        as_number(j["decrease_threshold"], p + "decrease_threshold");
  if (j.contains("expect")) st.expect = as_string(j["expect"], p + "expect");
  if (j.contains("localized_expect"))
    st.localized_expect =
        as_string(j["localized_expect"], p + "localized_expect");
  if (j.contains("localizer_center") && !j["localizer_center"].is_null())
    st.localizer_center =
        as_number(j["localizer_center"], p + "localizer_center");
  if (j.contains("localizer_width") && !j["localizer_width"].is_null())
    st.localizer_width = as_number(j["localizer_width"], p + "localizer_width");
  if (j.contains("dilation_depth"))
    st.dilation_depth = as_int(j["dilation_depth"], p + "dilation_depth");
  if (j.contains("horizon")) st.horizon = as_int(j["horizon"], p + "horizon");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<double>() < 0)
      bad_field(p + "seed", "expected a nonnegative integer");
    st.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("a0") && !j["a0"].is_null())
    st.a0_override = as_number(j["a0"], p + "a0");
  if (j.contains("mourre_a"))
    st.mourre_a = as_number(j["mourre_a"], p + "mourre_a");
  if (j.contains("defect_tol"))
    st.defect_tol = as_number(j["defect_tol"], p + "defect_tol");
  if (j.contains("imw_tol")) st.imw_tol = as_number(j["imw_tol"], p + "imw_tol");
  if (j.contains("virial_tol"))
    st.virial_tol = as_number(j["virial_tol"], p + "virial_tol");
  if (j.contains("dilation_unitarity_tol"))
    st.dilation_unitarity_tol =
        as_number(j["dilation_unitarity_tol"], p + "dilation_unitarity_tol");
  if (j.contains("dilation_compression_tol"))
    st.dilation_compression_tol = as_number(j["dilation_compression_tol"],
                                            p + "dilation_compression_tol");
  if (j.contains("correlation_tol"))
    st.correlation_tol = as_number(j["correlation_tol"], p + "correlation_tol");

  for (const char* key : {"expect", "localized_expect"}) {
    const std::string& v =
        std::string(key) == "expect" ? st.expect : st.localized_expect;
    if (v != "bounded" && v != "divergent" && v != "any")
      bad_field(p + key, "expected bounded, divergent or any");
  }
  return st;
}

json arc_json(const std::optional<Arc>& a) {
  if (!a) return nullptr;
  return json::array({a->lo, a->hi});
}

json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

// ---------------------------------------------------------------------------
// check execution
// ---------------------------------------------------------------------------

struct RunContext {
  const Scenario& sc;
  const Model& model;
  std::optional<double> a0;  // measured by hypotheses, consumed by deformation
  std::vector<ScanRecord>* scans;
};

void push_const(CheckResult& r, const char* name, double v) {
  r.constants.push_back({name, v});
}
void push_res(CheckResult& r, const char* name, double v) {
  r.residuals.push_back({name, v});
}
void append_msg(CheckResult& r, const std::string& msg) {
  if (!r.message.empty()) r.message += "; ";
  r.message += msg;
}

Arc inner_arc(const ScenarioSettings& st) {
  return st.arc.value_or(Arc{kPi / 3.0, 2.0 * kPi / 3.0});
}
Arc outer_arc_for(const ScenarioSettings& st, const Arc& inner) {
  return st.outer_arc.value_or(Arc{inner.lo - kPi / 8.0, inner.hi + kPi / 8.0});
}

Verdict verdict_from_expect(bool bounded, const std::string& expect,
                            CheckResult& r) {
  if (expect == "any") return Verdict::PASS;
  const bool want_bounded = expect == "bounded";
  if (bounded == want_bounded) return Verdict::PASS;
  append_msg(r, detail::strf("scan verdict %s does not match expectation %s",
                             bounded ? "BOUNDED" : "DIVERGENT",
                             expect.c_str()));
  return Verdict::WARN;
}

ScanGrid grid_for(const ScenarioSettings& st) {
  if (st.arc) return arc_grid(st.radii, *st.arc, st.angular_points);
  return full_circle_grid(st.radii, st.angular_points);
}

ScanRecord scan_record(const std::string& id, const std::string& kind,
                       const ScanResult& res, bool localized) {
  ScanRecord rec;
  rec.id = id;
  rec.kind = kind;
  rec.columns = {"re_z",  "im_z", "radius", "angle", "weighted_norm",
                 "unweighted_norm"};
  if (localized) rec.columns.push_back("localized_norm");
  for (const ScanPoint& pt : res.points) {
    std::vector<double> row = {pt.z.real(),        pt.z.imag(), pt.radius,
                               pt.angle,           pt.weighted_norm,
                               pt.unweighted_norm};
    if (localized) row.push_back(pt.localized_norm.value_or(0.0));
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

int failed_points(const ScanResult& res) {
  int n = 0;
  for (const ScanPoint& pt : res.points)
    if (!pt.solver_ok) ++n;
  return n;
}

void scan_constants(CheckResult& r, const ScanResult& res) {
  push_const(r, "sup", res.sup);
  push_const(r, "stabilization_ratio", res.stabilization_ratio);
  push_const(r, "divergence_ratio", res.divergence_ratio);
  push_const(r, "bounded", res.bounded ? 1.0 : 0.0);
}

CheckResult run_hypotheses(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "hypotheses";
  const ModelDefects md = model_defects(ctx.model);
  push_res(r, "v_contraction", md.v_contraction);
  push_res(r, "p_range", md.p_range);
  push_res(r, "q_range", md.q_range);
  if (md.u_unitary >= 0) push_res(r, "u_unitary", md.u_unitary);
  if (md.a_hermitian >= 0) push_res(r, "a_hermitian", md.a_hermitian);
  if (md.v_factorization >= 0)
    push_res(r, "v_factorization", md.v_factorization);
  bool ok = md.worst() <= st.defect_tol;
  if (!ok) append_msg(r, "operator defects exceed tolerance");

  if (ctx.model.has_A()) {
    const GlobalPositivityReport gp = global_positivity(ctx.model);
    push_const(r, "a0", gp.a0);
    push_const(r, "b", gp.b);
    if (gp.holds) {
      ctx.a0 = gp.a0;
    } else if (ctx.model.has_U()) {
      const Arc inner = inner_arc(st);
      const LocalBoundsReport lb =
          local_lower_bounds(ctx.model, inner, outer_arc_for(st, inner));
      push_const(r, "a0_local", lb.a0);
      push_const(r, "a1", lb.a1);
      push_const(r, "d0", lb.d0);
      push_const(r, "eperp_worst", lb.eperp_worst);
      push_res(r, "identity_residual_R", lb.identity_residual_R);
      push_res(r, "identity_residual_L", lb.identity_residual_L);
      if (!lb.feasible) {
        ok = false;
        append_msg(r, "no positive local commutator bound on the window");
      }
    } else {
      ok = false;
      append_msg(r, "global positivity fails and the family has no reference "
                    "unitary for the local route");
    }
  }
  r.verdict = ok ? Verdict::PASS : Verdict::FAIL;
  return r;
}

CheckResult run_mourre(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "mourre";
  const Arc inner = inner_arc(st);
  const MourreReport m =
      mourre_check(ctx.model, inner, st.mourre_a, outer_arc_for(st, inner));
  push_const(r, "a", m.a);
  push_const(r, "min_eig", m.min_eig);
  push_const(r, "min_eig_alt", m.min_eig_alt);
  push_const(r, "dim_ranE", m.dim_ranE);
  push_const(r, "d0", m.d0);
  if (m.vacuous) append_msg(r, "spectral window misses the spectrum");
  r.verdict = m.strict ? Verdict::PASS : Verdict::FAIL;
  if (!m.strict) append_msg(r, "estimate is not strict at the threshold");
  return r;
}

CheckResult run_h4(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "h4";
  const H4Report h = h4_check(ctx.model, st.mourre_a);
  push_const(r, "a", h.a);
  double worst_m = 0.0;
  for (const H4Entry& e : h.entries) {
    const char* side = e.name == "UV*" ? "right" : "left";
    push_const(r, detail::strf("m_%s", side).c_str(), e.m);
    push_const(r, detail::strf("alpha_max_%s", side).c_str(), e.alpha_max);
    worst_m = std::max(worst_m, e.m);
  }
  if (worst_m <= st.imw_tol)
    append_msg(r, "weak commutators vanish to working precision");
  r.verdict = h.holds ? Verdict::PASS : Verdict::FAIL;
  if (!h.holds) append_msg(r, "quadratic defect inequality fails");
  return r;
}

CheckResult run_virial(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "virial";
  const VirialReport v = virial_check(ctx.model);
  push_const(r, "boundary_pairs", static_cast<double>(v.pairs.size()));
  push_res(r, "worst_residual", v.worst_residual);
  r.verdict =
      v.worst_residual <= st.virial_tol ? Verdict::PASS : Verdict::FAIL;
  if (r.verdict == Verdict::FAIL)
    append_msg(r, "a boundary eigenpair violates the rigidity residuals");
  return r;
}

CheckResult run_lap_scan(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "lap-scan";
  const ScanResult res =
      lap_scan(ctx.model, st.s, grid_for(st), st.stabilization_threshold);
  ctx.scans->push_back(scan_record("lap_scan", "lap", res, false));
  r.scan_ids = {"lap_scan"};
  scan_constants(r, res);
  const int bad = failed_points(res);
  if (bad > 0) {
    append_msg(r, detail::strf("%d grid points failed to solve", bad));
    r.verdict = Verdict::FAIL;
    return r;
  }
  r.verdict = verdict_from_expect(res.bounded, st.expect, r);
  return r;
}

std::function<double(double)> bump_localizer(double center, double width) {
  return [center, width](double th) {
    const double x = std::remainder(th - center, 2.0 * kPi) / width;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
  };
}

CheckResult run_localized_scan(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "localized-scan";
  if (!st.localizer_center || !st.localizer_width)
    throw std::invalid_argument(
        "localized-scan: settings.localizer_center and "
        "settings.localizer_width are required");
  const ScanResult res = localized_scan(
      ctx.model, st.s, bump_localizer(*st.localizer_center, *st.localizer_width),
      grid_for(st), st.stabilization_threshold);
  ctx.scans->push_back(scan_record("localized_scan", "localized", res, true));
  r.scan_ids = {"localized_scan"};
  scan_constants(r, res);
  const int bad = failed_points(res);
  if (bad > 0) {
    append_msg(r, detail::strf("%d grid points failed to solve", bad));
    r.verdict = Verdict::FAIL;
    return r;
  }
  r.verdict = verdict_from_expect(res.bounded, st.localized_expect, r);
  return r;
}

CheckResult run_deformation(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "deformation";
  if (!ctx.model.has_A())
    throw std::invalid_argument("deformation: model lacks a conjugate operator");
  double a0 = 0.0;
  if (st.a0_override) {
    a0 = *st.a0_override;
  } else if (ctx.a0) {
    a0 = *ctx.a0;
  } else {
    const GlobalPositivityReport gp = global_positivity(ctx.model);
    if (!gp.holds)
      throw std::invalid_argument(
          "deformation: no positive global commutator bound; set settings.a0");
    a0 = gp.a0;
  }

  const RegularizedFamily fam = c2_family(ctx.model);
  ConvergenceOptions opts;
  opts.epsilons = st.epsilons;
  opts.angular_points = st.angular_points;
  opts.angles = st.arc;
  opts.decrease_threshold = st.decrease_threshold;
  opts.seed = derive_seed(st.seed, "deformation");
  const DeformationTrace tr = convergence_study(
      fam, ctx.model.A->mat, st.s, st.interior_radius, a0, opts);

  ScanRecord rec;
  rec.id = "deformation";
  rec.kind = "deformation";
  rec.columns = {"eps",    "re_z",       "im_z",   "radius",     "angle",
                 "d_value", "g_norm",    "dg_norm", "f_eps_norm", "f_diff",
                 "fd_norm", "h_bound",   "form_slack"};
  for (const DeformationPoint& pt : tr.points) {
    double angle = std::arg(pt.z);
    if (angle < 0) angle += 2.0 * kPi;
    rec.rows.push_back({pt.eps, pt.z.real(), pt.z.imag(), std::abs(pt.z),
                        angle, pt.d_value, pt.g_norm, pt.dg_norm,
                        pt.f_eps_norm, pt.f_diff, pt.fd_norm, pt.h_bound,
                        pt.form_slack});
  }
  ctx.scans->push_back(std::move(rec));
  r.scan_ids = {"deformation"};

  push_const(r, "a0", tr.a0);
  push_const(r, "b", tr.b);
  push_const(r, "c0", tr.c0);
  push_const(r, "sup_diff_first", tr.sup_diff.front());
  push_const(r, "sup_diff_last", tr.sup_diff.back());
  push_const(r, "final_over_initial", tr.final_over_initial);
  push_const(r, "interior_bound_worst", tr.interior_bound_worst);
  if (!tr.decreasing) {
    r.verdict = Verdict::FAIL;
    append_msg(r, "sup of the deformation difference is not decreasing");
  } else if (tr.final_over_initial <= st.decrease_threshold) {
    r.verdict = Verdict::PASS;
  } else {
    r.verdict = Verdict::WARN;
    append_msg(r, detail::strf("final/initial sup ratio %.6g above target %g",
                               tr.final_over_initial, st.decrease_threshold));
  }
  return r;
}

CheckResult run_dynamics(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "dynamics";
  Vector psi = Vector::Zero(ctx.model.dim());
  psi[0] = 1.0;
  const Trajectory tr = evolve(ctx.model.V, psi, st.horizon);
  bool mono = true;
  for (size_t i = 1; i < tr.norms.size(); ++i)
    if (tr.norms[i] > tr.norms[i - 1] + 1e-12) mono = false;
  const double ac = ac_constant(ctx.model.V, psi, st.horizon);
  const CnuSplit split = cnu_split(ctx.model.V);

  push_const(r, "ac_constant", ac);
  push_const(r, "final_norm", tr.norms.back());
  push_const(r, "horizon", static_cast<double>(tr.norms.size() - 1));
  push_const(r, "unitary_rank", static_cast<double>(split.unitary_rank));

  ScanRecord rec;
  rec.id = "dynamics";
  rec.kind = "dynamics";
  rec.columns = {"n", "norm"};
  KatoSums ks;
  const bool weighted = ctx.model.has_A();
  if (weighted) {
    ks = kato_sums(
        TruncatedOperator(weight(ctx.model.A->mat, st.s), ctx.model.V.window),
        ctx.model.V, psi, st.horizon);
    push_const(r, "kato_forward", ks.forward);
    push_const(r, "kato_adjoint", ks.adjoint);
    rec.columns.push_back("kato_forward_partial");
    rec.columns.push_back("kato_adjoint_partial");
  }
  for (size_t n = 0; n < tr.norms.size(); ++n) {
    std::vector<double> row = {static_cast<double>(n), tr.norms[n]};
    if (weighted) {
      row.push_back(ks.forward_partial[n]);
      row.push_back(ks.adjoint_partial[n]);
    }
    rec.rows.push_back(std::move(row));
  }
  ctx.scans->push_back(std::move(rec));
  r.scan_ids = {"dynamics"};

  r.verdict = mono ? Verdict::PASS : Verdict::FAIL;
  if (!mono) append_msg(r, "orbit norms increased along the trajectory");
  return r;
}

CheckResult run_dilation(RunContext& ctx) {
  const ScenarioSettings& st = ctx.sc.settings;
  CheckResult r;
  r.name = "dilation";
  const DilationOperator d = dilate(ctx.model.V, st.dilation_depth);
  Rng rng(derive_seed(st.seed, "dilation vectors"));
  double corr = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const Vector phi = rng.unit_vector(ctx.model.dim());
    const Vector psi = rng.unit_vector(ctx.model.dim());
    corr = std::max(corr,
                    dilation_correlation_residual(d, phi, psi, ctx.model.V));
  }
  push_const(r, "depth", static_cast<double>(d.depth));
  push_res(r, "unitarity_residual", d.unitarity_residual);
  push_res(r, "compression_residual", d.compression_residual);
  push_res(r, "correlation_residual", corr);
  const bool ok = d.unitarity_residual <= st.dilation_unitarity_tol &&
                  d.compression_residual <= st.dilation_compression_tol &&
                  corr <= st.correlation_tol;
  r.verdict = ok ? Verdict::PASS : Verdict::FAIL;
  if (!ok) append_msg(r, "dilation residuals exceed tolerance");
  return r;
}

CheckResult dispatch(const std::string& name, RunContext& ctx) {
  if (name == "hypotheses") return run_hypotheses(ctx);
  if (name == "mourre") return run_mourre(ctx);
  if (name == "h4") return run_h4(ctx);
  if (name == "virial") return run_virial(ctx);
  if (name == "lap-scan") return run_lap_scan(ctx);
  if (name == "localized-scan") return run_localized_scan(ctx);
  if (name == "deformation") return run_deformation(ctx);
  if (name == "dynamics") return run_dynamics(ctx);
  if (name == "dilation") return run_dilation(ctx);
  throw std::logic_error("dispatch: unknown check " + name);
}

std::string iso_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json named_obj(const std::vector<NamedValue>& vals) {
  json o = json::object();
  for (const NamedValue& v : vals) o[v.name] = v.value;
  return o;
}

std::vector<NamedValue> named_from(const json& o, const std::string& path) {
  if (!o.is_object()) throw std::invalid_argument("report: " + path);
  std::vector<NamedValue> out;
  for (auto it = o.begin(); it != o.end(); ++it)
    out.push_back({it.key(), it.value().get<double>()});
  return out;
}

Verdict verdict_from(const std::string& name) {
  if (name == "PASS") return Verdict::PASS;
  if (name == "FAIL") return Verdict::FAIL;
  if (name == "WARN") return Verdict::WARN;
  throw std::invalid_argument("report: unknown verdict " + name);
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    default: return "WARN";
  }
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) bad_field("(root)", "expected an object");
  reject_unknown(j, {"$schema", "model", "checks", "settings"}, "(root)");
  if (!j.contains("model")) bad_field("model", "required");

  Scenario sc;
  sc.model = parse_model(j["model"]);
  if (j.contains("checks")) {
    const json& cs = j["checks"];
    if (!cs.is_array()) bad_field("checks", "expected an array of names");
    for (size_t i = 0; i < cs.size(); ++i) {
      const std::string path = detail::strf("checks[%zu]", i);
      const std::string name = as_string(cs[i], path);
      if (!known_check(name)) bad_field(path, "unknown check '" + name + "'");
      for (const std::string& seen : sc.checks)
        if (seen == name) bad_field(path, "duplicate check '" + name + "'");
      sc.checks.push_back(name);
    }
  }
  sc.settings = parse_settings(j.contains("settings") ? j["settings"]
                                                      : json(nullptr));

  for (const std::string& name : sc.checks)
    if (name == "localized-scan" && (!sc.settings.localizer_center ||
                                     !sc.settings.localizer_width))
      bad_field("settings.localizer_center",
                "required by the localized-scan check");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("scenario: cannot open file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse_scenario(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " (file " + path + ")");
  }
}

std::string scenario_json(const Scenario& sc) {
  json model;
  model["family"] = family_name(sc.model.family);
  model["n"] = sc.model.n;
  if (sc.model.family == ModelFamily::toeplitz) {
    model["winding"] = sc.model.winding;
    model["band"] = sc.model.band;
    json hs = json::array();
    for (const Harmonic& h : sc.model.harmonics)
      hs.push_back(
          {{"k", h.k}, {"amplitude", h.amp}, {"phase", h.phase}});
    model["harmonics"] = hs;
  }
  if (sc.model.family == ModelFamily::quantum_walk) {
    model["coin_angle"] = sc.model.coin_angle;
    model["site_coin_angle"] = sc.model.site_coin_angle;
  }

  const ScenarioSettings& st = sc.settings;
  json settings;
  settings["s"] = st.s;
  settings["radii"] = st.radii;
  settings["angular_points"] = st.angular_points;
  settings["arc"] = arc_json(st.arc);
  settings["outer_arc"] = arc_json(st.outer_arc);
  settings["epsilons"] = st.epsilons;
  settings["interior_radius"] = st.interior_radius;
  settings["stabilization_threshold"] = st.stabilization_threshold;
  settings["decrease_threshold"] = st.decrease_threshold;
  settings["expect"] = st.expect;
  settings["localized_expect"] = st.localized_expect;
  settings["localizer_center"] = opt_json(st.localizer_center);
  settings["localizer_width"] = opt_json(st.localizer_width);
  settings["dilation_depth"] = st.dilation_depth;
  settings["horizon"] = st.horizon;
  settings["seed"] = st.seed;
  settings["a0"] = opt_json(st.a0_override);
  settings["mourre_a"] = st.mourre_a;
  settings["defect_tol"] = st.defect_tol;
  settings["imw_tol"] = st.imw_tol;
  settings["virial_tol"] = st.virial_tol;
  settings["dilation_unitarity_tol"] = st.dilation_unitarity_tol;
  settings["dilation_compression_tol"] = st.dilation_compression_tol;
  settings["correlation_tol"] = st.correlation_tol;

  json j;
  j["model"] = model;
  j["checks"] = sc.checks;
  j["settings"] = settings;
  return j.dump(2);
}

Model build_model(const ScenarioModel& spec) {
  switch (spec.family) {
    case ModelFamily::fundamental:
      return build_fundamental(spec.n);
    case ModelFamily::forward_shift:
      return build_forward_shift(spec.n);
    case ModelFamily::toeplitz:
      return build_toeplitz(
          unimodular_symbol(spec.winding, spec.harmonics, spec.band), spec.n);
    case ModelFamily::quantum_walk: {
      QuantumWalkSpec w;
      w.shift_coin = split_step_shift_coin(spec.coin_angle);
      w.momentum_absorber = momentum_half_projector();
      const double site_angle = spec.site_coin_angle;
      w.site_coin = [site_angle](int) { return rotation_block(site_angle); };
      w.site_absorber = [](int) { return Matrix::Identity(2, 2).eval(); };
      return build_quantum_walk(w, spec.n);
    }
    default:
      throw std::invalid_argument("build_model: unsupported family");
  }
}

const ScanRecord* Report::find_scan(const std::string& id) const {
  for (const ScanRecord& s : scans)
    if (s.id == id) return &s;
  return nullptr;
}

Report run_scenario(const Scenario& sc, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  if (threads < 0)
    throw std::invalid_argument("run_scenario: threads must be nonnegative");
  if (threads == 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : static_cast<int>(hc);
  }
  Report rep;
  rep.scenario = sc;
  rep.version = kVersion;
  rep.seed = sc.settings.seed;
  rep.threads = threads;
  rep.time_iso = iso_now();

  const Model model = build_model(sc.model);
  RunContext ctx{sc, model, std::nullopt, &rep.scans};
  for (const CheckDef& def : check_table()) {
    bool wanted = false;
    for (const std::string& name : sc.checks)
      if (name == def.name) wanted = true;
    if (!wanted) continue;
    CheckResult result;
    try {
      result = dispatch(def.name, ctx);
    } catch (const std::exception& e) {
      result = CheckResult{};
      result.name = def.name;
      result.verdict = Verdict::FAIL;
      result.message = e.what();
    }
    switch (result.verdict) {
      case Verdict::PASS: ++rep.n_pass; break;
      case Verdict::FAIL: ++rep.n_fail; break;
      default: ++rep.n_warn; break;
    }
    rep.checks.push_back(std::move(result));
  }
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return rep;
}

std::string report_json(const Report& rep) {
  json j;
  j["schema"] = "laplab-report-v1";
  j["provenance"] = {
      {"version", rep.version},
      {"seed", rep.seed},
      {"threads", rep.threads},
      {"timestamp", {{"iso", rep.time_iso}, {"wall_time_ms", rep.wall_time_ms}}}};
  j["scenario"] = json::parse(scenario_json(rep.scenario));

  json checks = json::array();
  for (const CheckResult& c : rep.checks) {
    json jc;
    jc["name"] = c.name;
    jc["verdict"] = verdict_name(c.verdict);
    jc["constants"] = named_obj(c.constants);
    jc["residuals"] = named_obj(c.residuals);
    jc["message"] = c.message;
    jc["scans"] = c.scan_ids;
    checks.push_back(jc);
  }
  j["checks"] = checks;

  json scans = json::array();
  for (const ScanRecord& s : rep.scans) {
    json js;
    js["id"] = s.id;
    js["kind"] = s.kind;
    js["columns"] = s.columns;
    js["rows"] = s.rows;
    scans.push_back(js);
  }
  j["scans"] = scans;

  j["summary"] = {{"pass", rep.n_pass},
                  {"fail", rep.n_fail},
                  {"warn", rep.n_warn},
                  {"exit_ok", rep.exit_ok()}};
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("report: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "laplab-report-v1")
    throw std::invalid_argument("report: not a laplab-report-v1 document");

  Report rep;
  rep.scenario = parse_scenario(j.at("scenario").dump());
  const json& prov = j.at("provenance");
  rep.version = prov.at("version").get<std::string>();
  rep.seed = prov.at("seed").get<std::uint64_t>();
  rep.threads = prov.at("threads").get<int>();
  rep.time_iso = prov.at("timestamp").at("iso").get<std::string>();
  rep.wall_time_ms = prov.at("timestamp").at("wall_time_ms").get<double>();

  for (const json& jc : j.at("checks")) {
    CheckResult c;
    c.name = jc.at("name").get<std::string>();
    c.verdict = verdict_from(jc.at("verdict").get<std::string>());
    c.constants = named_from(jc.at("constants"), "checks.constants");
    c.residuals = named_from(jc.at("residuals"), "checks.residuals");
    c.message = jc.at("message").get<std::string>();
    for (const json& sid : jc.at("scans"))
      c.scan_ids.push_back(sid.get<std::string>());
    switch (c.verdict) {
      case Verdict::PASS: ++rep.n_pass; break;
      case Verdict::FAIL: ++rep.n_fail; break;
      default: ++rep.n_warn; break;
    }
    rep.checks.push_back(std::move(c));
  }
  for (const json& js : j.at("scans")) {
    ScanRecord s;
    s.id = js.at("id").get<std::string>();
    s.kind = js.at("kind").get<std::string>();
    for (const json& col : js.at("columns"))
      s.columns.push_back(col.get<std::string>());
    for (const json& row : js.at("rows"))
      s.rows.push_back(row.get<std::vector<double>>());
    rep.scans.push_back(std::move(s));
  }
  return rep;
}

Report load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("report: cannot open file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return report_from_json(text);
}

std::string scan_csv(const ScanRecord& scan) {
  std::string out;
  for (size_t i = 0; i < scan.columns.size(); ++i) {
    if (i) out += ',';
    out += scan.columns[i];
  }
  out += '\n';
  for (const std::vector<double>& row : scan.rows) {
    if (row.size() != scan.columns.size())
      throw std::logic_error("scan_csv: row width does not match columns");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += detail::strf("%.15g", row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_report(const Report& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "report.json",
                      std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write_report: cannot write to " + out_dir);
    out << report_json(rep);
  }
  for (const ScanRecord& s : rep.scans) {
    std::ofstream out(fs::path(out_dir) / (s.id + ".csv"),
                      std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write_report: cannot write to " + out_dir);
    out << scan_csv(s);
  }
}

void emit_plotdata(const Report& rep, const std::string& scan_id,
                   const std::string& csv_path) {
  const ScanRecord* scan = rep.find_scan(scan_id);
  if (!scan)
    throw std::invalid_argument("emit_plotdata: unknown scan id '" + scan_id +
                                "'");
  std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("emit_plotdata: cannot write " + csv_path);
  out << scan_csv(*scan);
}

std::vector<std::pair<std::string, std::string>> list_checks() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CheckDef& def : check_table())
    out.emplace_back(def.name, def.description);
  return out;
}

}  // namespace laplab
