/* sdconform — required-behavior semantics and conformance checking for
 * textual sequence diagrams.
 *
 * C API over the core library: opaque handles, status codes, and
 * caller-freed strings. All functions are thread-compatible: distinct
 * handles may be used from distinct threads; a single handle must not be
 * used concurrently.
 */
#ifndef SDCONFORM_H
#define SDCONFORM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdc_status {
  SDC_OK = 0,
  SDC_ERR_PARSE = 1,
  SDC_ERR_VALIDATION = 2,
  SDC_ERR_UNSUPPORTED = 3,
  SDC_ERR_BUDGET = 4,
  SDC_ERR_INVALID_ARG = 5,
  SDC_ERR_IO = 6,
  SDC_ERR_INTERNAL = 7
} sdc_status;

typedef enum sdc_format { SDC_FORMAT_TEXT = 0, SDC_FORMAT_JSON = 1 } sdc_format;

/* An immutable, validated sequence diagram. */
typedef struct sdc_diagram sdc_diagram;

typedef struct sdc_options {
  int loop_bound;        /* loop unrolling bound; default 3 */
  long max_obligations;  /* per-semantics size budgets */
  long max_traces;       /* per-obligation */
  long max_trace_len;    /* per-trace */
  int paper_literal;     /* 1: composition equations without extra folding */
  int explain;           /* 1: include witness detail in reports */
  int format;            /* sdc_format */
  long budget_ms;        /* wall-clock budget; 0 = unlimited */
} sdc_options;

sdc_options sdc_options_default(void);

/* Strings returned through out-parameters are heap-allocated; release them
 * with sdc_string_free. On failure *err (when non-NULL) receives a message. */
void sdc_string_free(char* s);
void sdc_diagram_free(sdc_diagram* d);

/* Parsing: .sd DSL text or files; .sd.json structured files are recognized
 * by extension in sdc_parse_file. */
sdc_status sdc_parse_text(const char* text, const char* filename,
                          sdc_diagram** out, char** err);
sdc_status sdc_parse_file(const char* path, sdc_diagram** out, char** err);

const char* sdc_diagram_name(const sdc_diagram* d);

sdc_status sdc_print_dsl(const sdc_diagram* d, char** out, char** err);
sdc_status sdc_to_json(const sdc_diagram* d, char** out, char** err);

/* Canonical semantics report (text or JSON per options). */
sdc_status sdc_semantics(const sdc_diagram* d, const sdc_options* opts,
                         char** report, char** err);

/* Refinement d1 >= d2. *holds is 1/0. */
sdc_status sdc_refines(const sdc_diagram* d1, const sdc_diagram* d2,
                       const sdc_options* opts, int* holds, char** report,
                       char** err);

/* Conformance d1 |>_{rho,U} d2. rho_text: lines "from -> to"; may be NULL or
 * empty for the identity. hide_spec: comma-separated message names or event
 * forms !msg(S,R) / ?msg(S,R); NULL or empty for none. */
sdc_status sdc_conforms(const sdc_diagram* d1, const sdc_diagram* d2,
                        const char* rho_text, const char* hide_spec,
                        const sdc_options* opts, int* holds, char** report,
                        char** err);

/* Witness inference: every (rho, U) in the documented search space under
 * which d1 conforms to d2. *count receives the number of witnesses. */
sdc_status sdc_infer(const sdc_diagram* d1, const sdc_diagram* d2,
                     const sdc_options* opts, int* count, char** report,
                     char** err);

#ifdef __cplusplus
}
#endif

#endif /* SDCONFORM_H */
