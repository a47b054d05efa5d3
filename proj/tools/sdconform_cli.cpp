// Command line front end; everything runs through the shared library's C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdconform.h"

namespace {

// Exit codes: 0 the checked property holds (or plain success), 1 it does
// not hold, 2 bad input, 3 budget exceeded.
enum ExitStatus { kOk = 0, kDoesNotHold = 1, kInputError = 2, kBudget = 3 };

struct DiagramHandle {
  sdc_diagram* ptr = nullptr;
  ~DiagramHandle() { sdc_diagram_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { sdc_string_free(ptr); }
};

int status_exit(sdc_status status, const char* err) {
  if (err) std::fprintf(stderr, "error: %s\n", err);
  switch (status) {
    case SDC_OK: return kOk;
    case SDC_ERR_BUDGET: return kBudget;
    default: return kInputError;
  }
}

struct CommonOpts {
  int loop_bound = 3;
  long max_obligations = 0;
  long max_traces = 0;
  long max_trace_len = 0;
  bool explain = false;
  bool paper_literal = false;
  std::string format = "text";
  std::string rho_file;
  std::string hide_spec;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--loop-bound", o.loop_bound,
                  "loop unrolling bound (verdicts are relative to it)")
      ->default_val(3);
  cmd->add_option("--max-obligations", o.max_obligations,
                  "budget: obligations per semantics");
  cmd->add_option("--max-traces", o.max_traces,
                  "budget: traces per obligation");
  cmd->add_option("--max-trace-len", o.max_trace_len,
                  "budget: tokens per trace");
  cmd->add_flag("--explain", o.explain, "include witness detail in reports");
  cmd->add_flag("--paper-literal", o.paper_literal,
                "composition equations without the extra folding pass");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->default_val("text");
}

sdc_options make_options(const CommonOpts& o) {
  sdc_options opts = sdc_options_default();
  opts.loop_bound = o.loop_bound;
  if (o.max_obligations > 0) opts.max_obligations = o.max_obligations;
  if (o.max_traces > 0) opts.max_traces = o.max_traces;
  if (o.max_trace_len > 0) opts.max_trace_len = o.max_trace_len;
  opts.explain = o.explain ? 1 : 0;
  opts.paper_literal = o.paper_literal ? 1 : 0;
  opts.format = o.format == "json" ? SDC_FORMAT_JSON : SDC_FORMAT_TEXT;
  if (const char* budget = std::getenv("SDCONFORM_BUDGET_MS"))
    opts.budget_ms = std::atol(budget);
  return opts;
}

int load(const std::string& path, DiagramHandle& d) {
  StringHandle err;
  sdc_status status = sdc_parse_file(path.c_str(), &d.ptr, &err.ptr);
  if (status != SDC_OK) return status_exit(status, err.ptr);
  return kOk;
}

std::string read_text_file(const std::string& path, bool& ok) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    ok = false;
    return "";
  }
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  ok = true;
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sdconform: trace semantics, refinement and conformance checking for "
      "textual sequence diagrams"};
  app.require_subcommand(1);

  std::string file1, file2;

  auto* cmd_parse = app.add_subcommand(
      "parse", "parse a diagram and echo it (use --json for the structured "
               "form)");
  bool parse_json_out = false;
  cmd_parse->add_option("file", file1, "diagram file (.sd or .sd.json)")
      ->required();
  cmd_parse->add_flag("--json", parse_json_out, "emit the structured format");

  CommonOpts sem_opts;
  auto* cmd_sem =
      app.add_subcommand("sem", "print the required-behavior semantics");
  cmd_sem->add_option("file", file1, "diagram file")->required();
  add_common(cmd_sem, sem_opts);

  CommonOpts ref_opts;
  auto* cmd_refines = app.add_subcommand(
      "refines", "check that the first diagram refines the second");
  cmd_refines->add_option("file1", file1, "refining diagram")->required();
  cmd_refines->add_option("file2", file2, "refined diagram")->required();
  add_common(cmd_refines, ref_opts);

  CommonOpts conf_opts;
  auto* cmd_conforms = app.add_subcommand(
      "conforms",
      "check conformance of the first diagram to the second under --rho/--hide");
  cmd_conforms->add_option("file1", file1, "conforming diagram")->required();
  cmd_conforms->add_option("file2", file2, "target diagram")->required();
  cmd_conforms->add_option("--rho", conf_opts.rho_file,
                           "substitution file (lines 'from -> to')");
  cmd_conforms->add_option(
      "--hide", conf_opts.hide_spec,
      "events to hide: message names or !msg(S,R)/?msg(S,R), comma separated");
  add_common(cmd_conforms, conf_opts);

  CommonOpts inf_opts;
  auto* cmd_infer = app.add_subcommand(
      "infer", "search for all (rho, hidden-set) conformance witnesses");
  cmd_infer->add_option("file1", file1, "conforming diagram")->required();
  cmd_infer->add_option("file2", file2, "target diagram")->required();
  add_common(cmd_infer, inf_opts);

  CLI11_PARSE(app, argc, argv);

  if (cmd_parse->parsed()) {
    DiagramHandle d;
    if (int rc = load(file1, d)) return rc;
    StringHandle out, err;
    sdc_status status = parse_json_out ? sdc_to_json(d.ptr, &out.ptr, &err.ptr)
                                       : sdc_print_dsl(d.ptr, &out.ptr, &err.ptr);
    if (status != SDC_OK) return status_exit(status, err.ptr);
    std::fputs(out.ptr, stdout);
    return kOk;
  }

  if (cmd_sem->parsed()) {
    DiagramHandle d;
    if (int rc = load(file1, d)) return rc;
    sdc_options opts = make_options(sem_opts);
    StringHandle report, err;
    sdc_status status = sdc_semantics(d.ptr, &opts, &report.ptr, &err.ptr);
    if (status != SDC_OK) return status_exit(status, err.ptr);
    std::fputs(report.ptr, stdout);
    return kOk;
  }

  if (cmd_refines->parsed()) {
    DiagramHandle d1, d2;
    if (int rc = load(file1, d1)) return rc;
    if (int rc = load(file2, d2)) return rc;
    sdc_options opts = make_options(ref_opts);
    StringHandle report, err;
    int holds = 0;
    sdc_status status =
        sdc_refines(d1.ptr, d2.ptr, &opts, &holds, &report.ptr, &err.ptr);
    if (status != SDC_OK) return status_exit(status, err.ptr);
    std::fputs(report.ptr, stdout);
    return holds ? kOk : kDoesNotHold;
  }

  if (cmd_conforms->parsed()) {
    DiagramHandle d1, d2;
    if (int rc = load(file1, d1)) return rc;
    if (int rc = load(file2, d2)) return rc;
    std::string rho_text;
    if (!conf_opts.rho_file.empty()) {
      bool ok = false;
      rho_text = read_text_file(conf_opts.rho_file, ok);
      if (!ok) {
        std::fprintf(stderr, "error: cannot open %s\n",
                     conf_opts.rho_file.c_str());
        return kInputError;
      }
    }
    sdc_options opts = make_options(conf_opts);
    StringHandle report, err;
    int holds = 0;
    sdc_status status =
        sdc_conforms(d1.ptr, d2.ptr, rho_text.c_str(),
                     conf_opts.hide_spec.c_str(), &opts, &holds, &report.ptr,
                     &err.ptr);
    if (status != SDC_OK) return status_exit(status, err.ptr);
    std::fputs(report.ptr, stdout);
    return holds ? kOk : kDoesNotHold;
  }

  if (cmd_infer->parsed()) {
    DiagramHandle d1, d2;
    if (int rc = load(file1, d1)) return rc;
    if (int rc = load(file2, d2)) return rc;
    sdc_options opts = make_options(inf_opts);
    StringHandle report, err;
    int count = 0;
    sdc_status status =
        sdc_infer(d1.ptr, d2.ptr, &opts, &count, &report.ptr, &err.ptr);
    if (report.ptr) std::fputs(report.ptr, stdout);
    if (status != SDC_OK) return status_exit(status, err.ptr);
    return count > 0 ? kOk : kDoesNotHold;
  }

  return kInputError;
}
