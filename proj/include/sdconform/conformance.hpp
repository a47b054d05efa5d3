#ifndef SDCONFORM_CONFORMANCE_HPP
#define SDCONFORM_CONFORMANCE_HPP

#include "sdconform/semantics.hpp"
#include "sdconform/simulation.hpp"

namespace sdconform {

using HiddenSet = std::set<Event>;

/// Replaces every occurrence of an event in U with tau.
DiagramPtr hide(const DiagramPtr& d, const HiddenSet& u);

/// Replaces names everywhere (lifelines, messages, parameters, condition
/// variables); guard conditions are simplified after substitution.
DiagramPtr substitute(const DiagramPtr& d, const Substitution& rho);

Event substitute_event(const Event& e, const Substitution& rho);

/// Per-obligation evidence backing a refinement verdict.
struct RefinementWitness {
  std::size_t obligation1 = 0; // index into sem(D1) in canonical order
  std::size_t obligation2 = 0; // covered obligation of sem(D2)
  // For each trace of obligation2 (canonical order), the covering trace
  // index in obligation1.
  std::vector<std::size_t> trace_choice;
};

struct RefinementResult {
  bool holds = false;
  int loop_bound_used = 0;
  bool has_loop = false;
  std::vector<RefinementWitness> witnesses; // one per obligation of D1 when holds
  // When the check fails: the first uncovered obligation of D1.
  std::optional<std::size_t> failing_obligation;
};

/// D1 refines D2: every obligation of D1 covers, via trace simulation, some
/// obligation of D2. Verdict is relative to cfg.loop_bound.
/// Pre: validate passes on both.
RefinementResult refines(const DiagramPtr& d1, const DiagramPtr& d2,
                         const EvalConfig& cfg);

RefinementResult refines_sem(const SemSet& m1, const SemSet& m2,
                             const EvalConfig& cfg);

struct ConformanceWitness {
  Substitution rho;
  HiddenSet hidden;
  int loop_bound_used = 0;
  bool verified = false;
  RefinementResult refinement;

  std::string key() const; // canonical identity (sorted rho, sorted hidden)
};

struct ConformanceResult {
  bool holds = false;
  ConformanceWitness witness;
  // Which of the two defining conditions failed, for diagnostics.
  bool disjointness_ok = false;
  std::vector<Event> clashing_events; // rho(U) events hitting Evt(D2)
};

/// D1 conforms to D2 with respect to rho and U:
/// (1) rho(U) is disjoint from the events of D2, and
/// (2) rho(hide_U(D1)) refines D2.
/// Pre: U is a subset of events_of(D1); otherwise InvalidHiddenSet.
ConformanceResult conforms(const DiagramPtr& d1, const DiagramPtr& d2,
                           const Substitution& rho, const HiddenSet& u,
                           const EvalConfig& cfg);

struct InferConfig {
  EvalConfig eval;
  std::size_t max_candidates = 200000; // SearchBudgetExceeded past this
};

struct InferResult {
  std::vector<ConformanceWitness> witnesses; // canonical order, deduplicated
  bool partial = false;                      // search budget was hit
  std::string search_space_note;             // documented search space
};

/// Enumerates witness candidates (lifeline and message maps driven by event
/// compatibility; unmapped-message events hidden; guard variables assigned
/// from the target's variables, literals near them, boolean complements and
/// the distinguished `other`), validates each through conforms, and returns
/// every witness found, canonically ordered.
InferResult infer(const DiagramPtr& d1, const DiagramPtr& d2,
                  const InferConfig& cfg);

} // namespace sdconform

#endif
