#ifndef SDCONFORM_REPORT_HPP
#define SDCONFORM_REPORT_HPP

#include <string>

#include "sdconform/conformance.hpp"
#include "sdconform/frontend.hpp"

namespace sdconform {

enum class ReportFormat { Text, Json };

std::string semantics_report(const ParsedDiagram& d, const EvalResult& r,
                             const EvalConfig& cfg, ReportFormat fmt);

std::string refines_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                           const RefinementResult& r, ReportFormat fmt,
                           bool explain);

std::string conforms_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                            const ConformanceResult& r, ReportFormat fmt,
                            bool explain);

std::string infer_report(const ParsedDiagram& d1, const ParsedDiagram& d2,
                         const InferResult& r, ReportFormat fmt, bool explain);

std::string witness_json(const ConformanceWitness& w);

} // namespace sdconform

#endif
