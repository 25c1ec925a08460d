#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "laplab/models.hpp"
#include "laplab/symbols.hpp"

namespace laplab {

enum class Verdict { PASS, FAIL, WARN };
const char* verdict_name(Verdict v);

struct ScenarioModel {
  ModelFamily family = ModelFamily::fundamental;
  int n = 32;
  // toeplitz: truncation of exp(i(winding theta + sum_k amp cos(k theta + phase)))
  int winding = 1;
  std::vector<Harmonic> harmonics;
  int band = 8;
  // quantum walk
  double coin_angle = 0.4;
  double site_coin_angle = 0.3;
};

// Numeric settings with their defaults; every field is echoed back into the
// report so a report always names the values it was produced with.
struct ScenarioSettings {
  double s = 0.7;
  std::vector<double> radii = {0.9, 0.99, 0.999};
  int angular_points = 16;
  std::optional<Arc> arc;        // scan/estimate window, full circle if absent
  std::optional<Arc> outer_arc;  // enclosing window for local estimates
  std::vector<double> epsilons = {0.2, 0.1, 0.05, 0.025};
  double interior_radius = 0.9;  // radius for the deformation study
  double stabilization_threshold = 1.5;
  double decrease_threshold = 0.05;
  std::string expect = "bounded";            // lap-scan: bounded|divergent|any
  std::string localized_expect = "bounded";  // localized-scan expectation
  std::optional<double> localizer_center;    // angle of the bump localizer
  std::optional<double> localizer_width;     // half width of its support
  int dilation_depth = 6;
  int horizon = -1;  // trajectory length, -1 = 4 * dim
  std::uint64_t seed = 1;
  std::optional<double> a0_override;  // commutator bound fed to deformation
  double mourre_a = 1.0;              // threshold for mourre/h4

  // verdict tolerances
  double defect_tol = 1e-10;
  double imw_tol = 1e-12;
  double virial_tol = 1e-8;
  double dilation_unitarity_tol = 1e-10;
  double dilation_compression_tol = 1e-9;
  double correlation_tol = 1e-9;
};

struct Scenario {
  ScenarioModel model;
  std::vector<std::string> checks;  // executed in canonical order
  ScenarioSettings settings;
};

// Parse and validate scenario JSON.  Unknown fields, unknown check names and
// missing localizer data are rejected with a message naming the field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_json(const Scenario& sc);  // normalized echo
Model build_model(const ScenarioModel& spec);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::PASS;
  std::vector<NamedValue> constants;
  std::vector<NamedValue> residuals;
  std::string message;
  std::vector<std::string> scan_ids;
};

// Tabular payload attached to a check; lap scans use the fixed column set
// re_z,im_z,radius,angle,weighted_norm,unweighted_norm[,localized_norm].
struct ScanRecord {
  std::string id;
  std::string kind;  // lap | localized | deformation | dynamics
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  Scenario scenario;
  std::vector<CheckResult> checks;
  std::vector<ScanRecord> scans;
  int n_pass = 0;
  int n_fail = 0;
  int n_warn = 0;
  std::string version;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string time_iso;
  double wall_time_ms = 0.0;

  bool exit_ok() const { return n_fail == 0; }
  const ScanRecord* find_scan(const std::string& id) const;
};

Report run_scenario(const Scenario& sc, int threads = 1);

// Deterministic apart from the provenance timestamp object.
std::string report_json(const Report& rep);
Report report_from_json(const std::string& json_text);
Report load_report(const std::string& path);

// report.json plus one CSV per scan in out_dir (created if needed).
void write_report(const Report& rep, const std::string& out_dir);

// CSV text with 15 significant digits per value.
std::string scan_csv(const ScanRecord& scan);

// Write one scan of the report as CSV; throws when the id is unknown.
void emit_plotdata(const Report& rep, const std::string& scan_id,
                   const std::string& csv_path);

// Canonical check order with one-line descriptions.
std::vector<std::pair<std::string, std::string>> list_checks();

}  // namespace laplab
