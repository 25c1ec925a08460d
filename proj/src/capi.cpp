#include "laplab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "laplab/scenario.hpp"
#include "laplab/version.hpp"

struct laplab_report {
  laplab::Report rep;
};

namespace {

thread_local std::string g_last_error;

laplab_status fail(laplab_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Run f(), translating exceptions into status codes.
template <typename F>
laplab_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LAPLAB_OK;
  } catch (const std::invalid_argument& e) {
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LAPLAB_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(LAPLAB_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(LAPLAB_ERR_RUNTIME, "unknown error");
  }
}

laplab_status run_parsed(laplab::Scenario sc, const laplab_run_options* opts,
                         laplab_report** out) {
  int threads = 1;
  if (opts) {
    if (opts->has_seed) sc.settings.seed = opts->seed;
    threads = opts->threads;
  }
  auto* handle = new laplab_report{laplab::run_scenario(sc, threads)};
  *out = handle;
  return LAPLAB_OK;
}

}  // namespace

extern "C" {

const char* laplab_version(void) { return laplab::kVersion; }

const char* laplab_last_error(void) { return g_last_error.c_str(); }

laplab_status laplab_run_scenario_json(const char* scenario_json,
                                       const laplab_run_options* opts,
                                       laplab_report** out) {
  if (!scenario_json || !out)
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    run_parsed(laplab::parse_scenario(scenario_json), opts, out);
  });
}

laplab_status laplab_run_scenario_file(const char* path,
                                       const laplab_run_options* opts,
                                       laplab_report** out) {
  if (!path || !out) return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded(
      [&] { run_parsed(laplab::load_scenario(path), opts, out); });
}

laplab_status laplab_report_parse(const char* report_json,
                                  laplab_report** out) {
  if (!report_json || !out)
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new laplab_report{laplab::report_from_json(report_json)};
  });
}

laplab_status laplab_report_read(const char* path, laplab_report** out) {
  if (!path || !out) return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new laplab_report{laplab::load_report(path)}; });
}

void laplab_report_free(laplab_report* rep) { delete rep; }

laplab_status laplab_report_json(const laplab_report* rep, char** out_json) {
  if (!rep || !out_json)
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out_json = nullptr;
  return guarded([&] {
    *out_json = dup_string(laplab::report_json(rep->rep));
    if (!*out_json) throw std::bad_alloc();
  });
}

void laplab_string_free(char* s) { std::free(s); }

laplab_status laplab_report_exit_ok(const laplab_report* rep, int* ok) {
  if (!rep || !ok) return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *ok = rep->rep.exit_ok() ? 1 : 0;
  g_last_error.clear();
  return LAPLAB_OK;
}

laplab_status laplab_report_write(const laplab_report* rep,
                                  const char* out_dir) {
  if (!rep || !out_dir)
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  const laplab_status st =
      guarded([&] { laplab::write_report(rep->rep, out_dir); });
  if (st == LAPLAB_ERR_RUNTIME) return fail(LAPLAB_ERR_IO, g_last_error.c_str());
  return st;
}

laplab_status laplab_emit_plotdata(const laplab_report* rep,
                                   const char* scan_id, const char* csv_path) {
  if (!rep || !scan_id || !csv_path)
    return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  if (!rep->rep.find_scan(scan_id))
    return fail(LAPLAB_ERR_NOT_FOUND,
                (std::string("unknown scan id '") + scan_id + "'").c_str());
  const laplab_status st =
      guarded([&] { laplab::emit_plotdata(rep->rep, scan_id, csv_path); });
  if (st == LAPLAB_ERR_RUNTIME) return fail(LAPLAB_ERR_IO, g_last_error.c_str());
  return st;
}

laplab_status laplab_list_checks(char** out_text) {
  if (!out_text) return fail(LAPLAB_ERR_INVALID_ARGUMENT, "null argument");
  *out_text = nullptr;
  return guarded([&] {
    std::string text;
    for (const auto& [name, desc] : laplab::list_checks())
      text += name + ": " + desc + "\n";
    *out_text = dup_string(text);
    if (!*out_text) throw std::bad_alloc();
  });
}

}  // extern "C"
