#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <laplab.h>

namespace {

int die(const char* context) {
  std::fprintf(stderr, "laplab: %s: %s\n", context, laplab_last_error());
  return 2;
}

int cmd_run(const std::string& config, const std::string& out_dir,
            const laplab_run_options& opts) {
  laplab_report* rep = nullptr;
  if (laplab_run_scenario_file(config.c_str(), &opts, &rep) != LAPLAB_OK)
    return die("run");
  if (laplab_report_write(rep, out_dir.c_str()) != LAPLAB_OK) {
    laplab_report_free(rep);
    return die("write");
  }
  int ok = 0;
  laplab_report_exit_ok(rep, &ok);
  laplab_report_free(rep);
  std::printf("report written to %s/report.json\n", out_dir.c_str());
  return ok ? 0 : 1;
}

int cmd_emit(const std::string& report_path, const std::string& scan_id,
             const std::string& out_dir) {
  laplab_report* rep = nullptr;
  if (laplab_report_read(report_path.c_str(), &rep) != LAPLAB_OK)
    return die("emit-plotdata");
  const std::string csv = out_dir + "/" + scan_id + ".csv";
  if (laplab_emit_plotdata(rep, scan_id.c_str(), csv.c_str()) != LAPLAB_OK) {
    laplab_report_free(rep);
    return die("emit-plotdata");
  }
  laplab_report_free(rep);
  std::printf("%s\n", csv.c_str());
  return 0;
}

int cmd_list() {
  char* text = nullptr;
  if (laplab_list_checks(&text) != LAPLAB_OK) return die("list-checks");
  std::fputs(text, stdout);
  laplab_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      std::string("laplab ") + laplab_version() +
      ": scenario-driven checks and scans for contraction resolvents"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string scan_id;

  CLI::App* run = app.add_subcommand(
      "run", "run a scenario and write report.json plus scan CSV files");
  run->add_option("--config", config, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--threads", threads, "worker threads, 0 = auto");

  CLI::App* emit = app.add_subcommand(
      "emit-plotdata", "extract one scan of a report as CSV");
  emit->add_option("scan", scan_id, "scan id inside the report")->required();
  emit->add_option("--config", config, "report JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  emit->add_option("--out", out_dir, "output directory");

  app.add_subcommand("list-checks",
                     "list available checks in canonical run order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0, any usage error exits 2
  }

  if (run->parsed()) {
    laplab_run_options opts{};
    opts.has_seed = seed_opt->count() > 0 ? 1 : 0;
    opts.seed = seed;
    opts.threads = threads;
    return cmd_run(config, out_dir, opts);
  }
  if (emit->parsed()) return cmd_emit(config, scan_id, out_dir);
  return cmd_list();
}
