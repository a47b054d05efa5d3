#include "sdconform.h"

#include <cstring>
#include <new>
#include <string>

#include "sdconform/errors.hpp"
#include "sdconform/report.hpp"

using namespace sdconform;

struct sdc_diagram {
  ParsedDiagram parsed;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_err(char** err, const std::string& message) {
  if (err) *err = dup_string(message);
}

sdc_status status_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Parse: return SDC_ERR_PARSE;
    case ErrorCode::Validation: return SDC_ERR_VALIDATION;
    case ErrorCode::UnsupportedOperator: return SDC_ERR_UNSUPPORTED;
    case ErrorCode::AtomBudgetExceeded:
    case ErrorCode::SizeBudgetExceeded:
    case ErrorCode::SearchBudgetExceeded: return SDC_ERR_BUDGET;
    case ErrorCode::NestedCritical:
    case ErrorCode::InvalidHiddenSet:
    case ErrorCode::InvalidArgument: return SDC_ERR_INVALID_ARG;
    case ErrorCode::Io: return SDC_ERR_IO;
  }
  return SDC_ERR_INTERNAL;
}

template <typename Fn>
sdc_status guarded(char** err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    set_err(err, e.what());
    return status_of(e);
  } catch (const std::bad_alloc&) {
    set_err(err, "out of memory");
    return SDC_ERR_BUDGET;
  } catch (const std::exception& e) {
    set_err(err, e.what());
    return SDC_ERR_INTERNAL;
  }
}

EvalConfig eval_config(const sdc_options* opts) {
  EvalConfig cfg;
  if (!opts) return cfg;
  cfg.loop_bound = opts->loop_bound;
  if (opts->max_obligations > 0)
    cfg.max_obligations = static_cast<std::size_t>(opts->max_obligations);
  if (opts->max_traces > 0)
    cfg.max_traces_per_obligation = static_cast<std::size_t>(opts->max_traces);
  if (opts->max_trace_len > 0)
    cfg.max_trace_length = static_cast<std::size_t>(opts->max_trace_len);
  cfg.paper_literal = opts->paper_literal != 0;
  cfg.set_budget_ms(opts->budget_ms);
  return cfg;
}

ReportFormat format_of(const sdc_options* opts) {
  return opts && opts->format == SDC_FORMAT_JSON ? ReportFormat::Json
                                                 : ReportFormat::Text;
}

bool explain_of(const sdc_options* opts) { return opts && opts->explain != 0; }

} // namespace

extern "C" {

sdc_options sdc_options_default(void) {
  sdc_options o;
  o.loop_bound = 3;
  o.max_obligations = 1000000;
  o.max_traces = 100000;
  o.max_trace_len = 100000;
  o.paper_literal = 0;
  o.explain = 0;
  o.format = SDC_FORMAT_TEXT;
  o.budget_ms = 0;
  return o;
}

void sdc_string_free(char* s) { std::free(s); }

void sdc_diagram_free(sdc_diagram* d) { delete d; }

sdc_status sdc_parse_text(const char* text, const char* filename,
                          sdc_diagram** out, char** err) {
  if (!text || !out) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    auto parsed = parse_dsl(text, filename ? filename : "<input>");
    *out = new sdc_diagram{std::move(parsed)};
    return SDC_OK;
  });
}

sdc_status sdc_parse_file(const char* path, sdc_diagram** out, char** err) {
  if (!path || !out) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    auto parsed = parse_file_any(path);
    *out = new sdc_diagram{std::move(parsed)};
    return SDC_OK;
  });
}

const char* sdc_diagram_name(const sdc_diagram* d) {
  return d ? d->parsed.name.c_str() : nullptr;
}

sdc_status sdc_print_dsl(const sdc_diagram* d, char** out, char** err) {
  if (!d || !out) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    *out = dup_string(print_dsl(d->parsed));
    return SDC_OK;
  });
}

sdc_status sdc_to_json(const sdc_diagram* d, char** out, char** err) {
  if (!d || !out) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    *out = dup_string(to_json(d->parsed));
    return SDC_OK;
  });
}

sdc_status sdc_semantics(const sdc_diagram* d, const sdc_options* opts,
                         char** report, char** err) {
  if (!d || !report) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    EvalConfig cfg = eval_config(opts);
    EvalResult r = evaluate(d->parsed.root, cfg);
    *report = dup_string(semantics_report(d->parsed, r, cfg, format_of(opts)));
    return SDC_OK;
  });
}

sdc_status sdc_refines(const sdc_diagram* d1, const sdc_diagram* d2,
                       const sdc_options* opts, int* holds, char** report,
                       char** err) {
  if (!d1 || !d2 || !holds) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    EvalConfig cfg = eval_config(opts);
    RefinementResult r = refines(d1->parsed.root, d2->parsed.root, cfg);
    *holds = r.holds ? 1 : 0;
    if (report)
      *report = dup_string(refines_report(d1->parsed, d2->parsed, r,
                                          format_of(opts), explain_of(opts)));
    return SDC_OK;
  });
}

sdc_status sdc_conforms(const sdc_diagram* d1, const sdc_diagram* d2,
                        const char* rho_text, const char* hide_spec,
                        const sdc_options* opts, int* holds, char** report,
                        char** err) {
  if (!d1 || !d2 || !holds) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    EvalConfig cfg = eval_config(opts);
    Substitution rho =
        rho_text && *rho_text ? parse_rho(rho_text) : Substitution{};
    HiddenSet u = hide_spec && *hide_spec
                      ? parse_hidden(hide_spec, d1->parsed.root)
                      : HiddenSet{};
    ConformanceResult r =
        conforms(d1->parsed.root, d2->parsed.root, rho, u, cfg);
    *holds = r.holds ? 1 : 0;
    if (report)
      *report = dup_string(conforms_report(d1->parsed, d2->parsed, r,
                                           format_of(opts), explain_of(opts)));
    return SDC_OK;
  });
}

sdc_status sdc_infer(const sdc_diagram* d1, const sdc_diagram* d2,
                     const sdc_options* opts, int* count, char** report,
                     char** err) {
  if (!d1 || !d2 || !count) {
    set_err(err, "null argument");
    return SDC_ERR_INVALID_ARG;
  }
  return guarded(err, [&] {
    InferConfig cfg;
    cfg.eval = eval_config(opts);
    InferResult r = infer(d1->parsed.root, d2->parsed.root, cfg);
    *count = static_cast<int>(r.witnesses.size());
    if (report)
      *report = dup_string(infer_report(d1->parsed, d2->parsed, r,
                                        format_of(opts), explain_of(opts)));
    if (r.partial) {
      set_err(err, "witness search budget exhausted; results are partial");
      return SDC_ERR_BUDGET;
    }
    return SDC_OK;
  });
}

} // extern "C"
