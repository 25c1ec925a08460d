#ifndef LAPLAB_H
#define LAPLAB_H

/* C interface to the contraction-resolvent laboratory.  All functions return
 * a status code; on any failure laplab_last_error() yields a thread-local
 * message describing what went wrong.  Strings returned through out-pointers
 * are heap-allocated and must be released with laplab_string_free; reports
 * must be released with laplab_report_free. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum laplab_status {
  LAPLAB_OK = 0,
  LAPLAB_ERR_INVALID_ARGUMENT = 1,
  LAPLAB_ERR_RUNTIME = 2,
  LAPLAB_ERR_IO = 3,
  LAPLAB_ERR_NOT_FOUND = 4
} laplab_status;

typedef struct laplab_report laplab_report;

typedef struct laplab_run_options {
  int has_seed;  /* nonzero: seed replaces the scenario's own seed */
  uint64_t seed;
  int threads;   /* 0 = auto; recorded in the report provenance */
} laplab_run_options;

/* Library version string, static storage. */
const char* laplab_version(void);

/* Thread-local message of the last failed call, empty string when none. */
const char* laplab_last_error(void);

/* Run a scenario given as JSON text / as a file path.  opts may be NULL. */
laplab_status laplab_run_scenario_json(const char* scenario_json,
                                       const laplab_run_options* opts,
                                       laplab_report** out);
laplab_status laplab_run_scenario_file(const char* path,
                                       const laplab_run_options* opts,
                                       laplab_report** out);

/* Reconstruct a report handle from its JSON document. */
laplab_status laplab_report_parse(const char* report_json,
                                  laplab_report** out);
laplab_status laplab_report_read(const char* path, laplab_report** out);

void laplab_report_free(laplab_report* rep);

/* Serialize the report; *out_json is malloc-style allocated. */
laplab_status laplab_report_json(const laplab_report* rep, char** out_json);
void laplab_string_free(char* s);

/* 1 when no check failed, 0 otherwise. */
laplab_status laplab_report_exit_ok(const laplab_report* rep, int* ok);

/* Write report.json plus one CSV per scan into out_dir. */
laplab_status laplab_report_write(const laplab_report* rep,
                                  const char* out_dir);

/* Write one scan of the report as CSV. */
laplab_status laplab_emit_plotdata(const laplab_report* rep,
                                   const char* scan_id, const char* csv_path);

/* Newline-separated "name: description" lines in canonical run order. */
laplab_status laplab_list_checks(char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* LAPLAB_H */
