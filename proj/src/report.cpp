#include "sdconform/report.hpp"

#include <sstream>

#include <json.hpp>

namespace sdconform {

namespace {

using nlohmann::json;

constexpr int kReportSchemaVersion = 1;

json semset_json(const SemSet& m) {
  json obligations = json::array();
  for (const auto& texts : semset_text(m)) {
    json o = json::array();
    for (const auto& t : texts) o.push_back(t);
    obligations.push_back(std::move(o));
  }
  return obligations;
}

json rho_json(const Substitution& rho) {
  json entries = json::array();
  for (const auto& [from, to] : rho.entries())
    entries.push_back(json{{"from", from}, {"to", to.text}});
  return entries;
}

json hidden_json(const HiddenSet& u) {
  json events = json::array();
  for (const auto& e : u) events.push_back(e.text());
  return events;
}

json witness_to_json(const ConformanceWitness& w) {
  return json{{"rho", rho_json(w.rho)},
              {"hidden", hidden_json(w.hidden)},
              {"loop_bound", w.loop_bound_used},
              {"verified", w.verified}};
}

void print_rho(const Substitution& rho, std::ostream& out) {
  if (rho.empty()) {
    out << "  rho: identity\n";
    return;
  }
  out << "  rho:\n";
  for (const auto& [from, to] : rho.entries())
    out << "    " << from << " -> " << to.text << '\n';
}

void print_hidden(const HiddenSet& u, std::ostream& out) {
  if (u.empty()) {
    out << "  hidden: none\n";
    return;
  }
  out << "  hidden:\n";
  for (const auto& e : u) out << "    " << e.text() << '\n';
}

void print_refinement_detail(const RefinementResult& r, std::ostream& out) {
  for (const auto& w : r.witnesses) {
    out << "    obligation " << w.obligation1 << " covers obligation "
        << w.obligation2 << " via traces [";
    bool first = true;
    for (auto k : w.trace_choice) {
      if (!first) out << ' ';
      first = false;
      out << k;
    }
    out << "]\n";
  }
}

} // namespace

std::string semantics_report(const ParsedDiagram& d, const EvalResult& r,
                             const EvalConfig& cfg, ReportFormat fmt) {
  auto texts = semset_text(r.sem);
  if (fmt == ReportFormat::Json) {
    json j{{"schema_version", kReportSchemaVersion},
           {"diagram", d.name},
           {"loop_bound", r.loop_bound_used},
           {"loop_bound_relevant", r.has_loop},
           {"paper_literal", cfg.paper_literal},
           {"obligation_count", texts.size()},
           {"obligations", semset_json(r.sem)}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "semantics of " << d.name << " (loop bound " << r.loop_bound_used;
  if (!r.has_loop) out << ", no loops";
  if (cfg.paper_literal) out << ", paper-literal mode";
  out << "): " << texts.size() << " obligation"
      << (texts.size() == 1 ? "" : "s") << "\n";
  std::size_t i = 0;
  for (const auto& o : texts) {
    out << "  obligation " << i++ << ":\n";
    for (const auto& t : o) out << "    " << t << '\n';
  }
  return out.str();
}

std::string refines_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                           const RefinementResult& r, ReportFormat fmt,
                           bool explain) {
  if (fmt == ReportFormat::Json) {
    json j{{"schema_version", kReportSchemaVersion},
           {"first", d1.name},
           {"second", d2.name},
           {"holds", r.holds},
           {"loop_bound", r.loop_bound_used}};
    if (!r.holds && r.failing_obligation)
      j["failing_obligation"] = *r.failing_obligation;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << d1.name << (r.holds ? " refines " : " does not refine ") << d2.name
      << " (relative to loop bound " << r.loop_bound_used << ")\n";
  if (!r.holds && r.failing_obligation)
    out << "  obligation " << *r.failing_obligation
        << " of " << d1.name << " covers no obligation of " << d2.name << '\n';
  if (r.holds && explain) print_refinement_detail(r, out);
  return out.str();
}

std::string conforms_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                            const ConformanceResult& r, ReportFormat fmt,
                            bool explain) {
  if (fmt == ReportFormat::Json) {
    json j{{"schema_version", kReportSchemaVersion},
           {"first", d1.name},
           {"second", d2.name},
           {"holds", r.holds},
           {"disjointness_ok", r.disjointness_ok},
           {"witness", witness_to_json(r.witness)}};
    if (!r.disjointness_ok) {
      json clashes = json::array();
      for (const auto& e : r.clashing_events) clashes.push_back(e.text());
      j["clashing_events"] = clashes;
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << d1.name << (r.holds ? " conforms to " : " does not conform to ")
      << d2.name << " (relative to loop bound " << r.witness.loop_bound_used
      << ")\n";
  print_rho(r.witness.rho, out);
  print_hidden(r.witness.hidden, out);
  if (!r.disjointness_ok) {
    out << "  renamed hidden events clash with events of " << d2.name << ":\n";
    for (const auto& e : r.clashing_events) out << "    " << e.text() << '\n';
  } else if (!r.holds && r.witness.refinement.failing_obligation) {
    out << "  refinement fails at obligation "
        << *r.witness.refinement.failing_obligation << '\n';
  }
  if (r.holds && explain) print_refinement_detail(r.witness.refinement, out);
  return out.str();
}

std::string infer_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                         const InferResult& r, ReportFormat fmt, bool explain) {
  if (fmt == ReportFormat::Json) {
    json witnesses = json::array();
    for (const auto& w : r.witnesses) witnesses.push_back(witness_to_json(w));
    json j{{"schema_version", kReportSchemaVersion},
           {"first", d1.name},
           {"second", d2.name},
           {"witness_count", r.witnesses.size()},
           {"partial", r.partial},
           {"search_space", r.search_space_note},
           {"witnesses", witnesses}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "conformance witnesses for " << d1.name << " |> " << d2.name << ": "
      << r.witnesses.size() << " found";
  if (r.partial) out << " (search budget exhausted; results are partial)";
  out << '\n';
  out << "  " << r.search_space_note << '\n';
  std::size_t i = 0;
  for (const auto& w : r.witnesses) {
    out << "witness " << i++ << " (loop bound " << w.loop_bound_used << "):\n";
    print_rho(w.rho, out);
    print_hidden(w.hidden, out);
    if (explain) print_refinement_detail(w.refinement, out);
  }
  return out.str();
}

std::string witness_json(const ConformanceWitness& w) {
  return witness_to_json(w).dump(2) + "\n";
}

} // namespace sdconform
