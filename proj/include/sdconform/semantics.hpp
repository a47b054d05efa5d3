#ifndef SDCONFORM_SEMANTICS_HPP
#define SDCONFORM_SEMANTICS_HPP

#include <chrono>
#include <cstdint>
#include <optional>

#include "sdconform/traces.hpp"

namespace sdconform {

/// A finite set of required traces; an implementation choosing the
/// obligation must be able to produce every trace in it.
/// Kept sorted and duplicate-free.
using Obligation = std::vector<Trace>;

/// A set of alternative obligations, kept sorted and duplicate-free.
/// Results of evaluate are down-closed (no obligation is a proper superset
/// of another) and fold-stable.
using SemSet = std::vector<Obligation>;

struct EvalConfig {
  int loop_bound = 3;
  std::size_t max_obligations = 1000000;
  std::size_t max_traces_per_obligation = 100000;
  std::size_t max_trace_length = 100000;
  /// Follow the composition equations literally: no extra fold/minimize
  /// pass after par/seq/block/loop and no empty-semantics loop shortcut.
  bool paper_literal = false;
  int atom_cap = kDefaultAtomCap;
  /// Zero means no wall-clock budget.
  std::chrono::steady_clock::time_point deadline{};
  bool has_deadline = false;

  void set_budget_ms(long ms);
  void check_deadline(const char* where) const;
};

Obligation make_obligation(std::vector<Trace> traces);
SemSet make_semset(std::vector<Obligation> obligations);

bool obligation_equal(const Obligation& a, const Obligation& b);
bool semset_equal(const SemSet& a, const SemSet& b);

/// Fold: within one obligation, a pair of traces alpha.c.beta / alpha.c'.beta
/// whose guards c, c' are jointly tautological collapses to alpha.beta; a
/// single trace whose guard token is itself tautological (c v c |= true)
/// drops that token. Rewrites to the unique normal form, scanning in
/// canonical trace-text order.
Obligation fold_obligation(const Obligation& o, int atom_cap = kDefaultAtomCap);

/// The down-arrow operator: drops obligations that have a proper subset in
/// the set, and duplicates.
SemSet minimize(const SemSet& m);

/// minimize . fold, the normalization applied after every composite
/// operator in the default mode.
SemSet normalize(const SemSet& m, const EvalConfig& cfg);

struct EvalResult {
  SemSet sem;
  int loop_bound_used = 0;
  bool has_loop = false;
};

/// The required-behavior semantics of a diagram. Loops are unrolled to
/// cfg.loop_bound; the bound used is reported alongside the result.
/// Pre: validate(d) is empty.
EvalResult evaluate(const DiagramPtr& d, const EvalConfig& cfg);

SemSet evaluate_sem(const DiagramPtr& d, const EvalConfig& cfg);

// Composition operators, exposed for tests and the conformance engine.

/// Pairwise interleave of two obligations: one obligation per choice of an
/// admissible shuffle for every trace pair, then minimize.
SemSet par_combine(const Obligation& o1, const Obligation& o2,
                   const EvalConfig& cfg);

/// Weak sequencing of two semantics: shuffles in which a left token never
/// follows a right token sharing a lifeline.
SemSet seq_combine(const SemSet& m1, const SemSet& m2, const EvalConfig& cfg);

/// Block combination: left fold over labels in canonical sorted order of the
/// tagged interleave, keeping only shuffles consistent with the strict
/// closure of the label order.
SemSet block_combine(const std::vector<Label>& labels,
                     const std::map<Label, SemSet>& bodies,
                     const std::set<LabelEdge>& order, const EvalConfig& cfg);

/// Loop series X_0 = {{!c}}, X_{i+1} = ({{c}} . (sem(D) |x| X_i)) u# {{!c}},
/// returned at i = cfg.loop_bound. A body with empty semantics short-circuits
/// to {{eps}} (not in paper_literal mode).
SemSet loop_eval(const CondPtr& c, const DiagramPtr& d, const EvalConfig& cfg);

/// Canonical report order: obligations and traces sorted by canonical text.
std::vector<std::vector<std::string>> semset_text(const SemSet& m);

} // namespace sdconform

#endif
