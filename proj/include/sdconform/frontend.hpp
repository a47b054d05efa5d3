#ifndef SDCONFORM_FRONTEND_HPP
#define SDCONFORM_FRONTEND_HPP

#include <string>

#include "sdconform/conformance.hpp"

namespace sdconform {

struct ParsedDiagram {
  std::string name;
  DiagramPtr root;
};

/// Parses the textual DSL. Runs validate automatically and throws
/// ValidationError listing the violations; neg/assert/break/ignore/consider/
/// ref are rejected with UnsupportedOperator.
ParsedDiagram parse_dsl(const std::string& text, const std::string& filename = "<input>");

ParsedDiagram parse_dsl_file(const std::string& path);

/// Pretty-prints to the DSL; parse_dsl(print_dsl(d)) equals d up to block
/// label renaming.
std::string print_dsl(const ParsedDiagram& d);

/// Structured format (.sd.json), versioned with schema_version.
std::string to_json(const ParsedDiagram& d);
ParsedDiagram parse_json(const std::string& text, const std::string& filename = "<json>");
ParsedDiagram parse_json_file(const std::string& path);

/// Either format, chosen by file extension (.sd.json / .json vs .sd).
ParsedDiagram parse_file_any(const std::string& path);

CondPtr parse_cond(const std::string& text);

/// Substitution file: one `from -> to` per line (to = name or literal);
/// blank lines and #-comments ignored.
Substitution parse_rho(const std::string& text);
Substitution parse_rho_file(const std::string& path);

/// Hidden-set specification: comma-separated items; each item is either a
/// message name (hides all events of that message) or an event form
/// !msg(sender,receiver) / ?msg(sender,receiver). Items must match at least
/// one event of d; the result must be a subset of events_of(d).
HiddenSet parse_hidden(const std::string& spec, const DiagramPtr& d);

} // namespace sdconform

#endif
