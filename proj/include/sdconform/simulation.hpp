#ifndef SDCONFORM_SIMULATION_HPP
#define SDCONFORM_SIMULATION_HPP

#include <cstddef>
#include <optional>

#include "sdconform/traces.hpp"

namespace sdconform {

/// Evidence for t1 |>< t2: which critical segments of t1 were flattened and
/// the strictly increasing position map from the flattened t1 into t2.
/// Every t2 position outside the map's image holds a condition.
struct SimWitness {
  std::vector<std::size_t> unwrap_choices; // positions of flattened segments in t1
  std::vector<std::size_t> eta;            // eta[i] = matched position in t2
};

/// Decides the trace simulation relation t1 |>< t2: after flattening some
/// choice of t1's critical segments, every t1 token matches a t2 token in
/// order (events by equality, conditions by reverse entailment, segments
/// recursively), and every unmatched t2 token is a condition.
bool simulates(const Trace& t1, const Trace& t2, int atom_cap = kDefaultAtomCap,
               SimWitness* witness = nullptr);

/// Replays a witness against the definition, independently of the search.
bool witness_valid(const Trace& t1, const Trace& t2, const SimWitness& w,
                   int atom_cap = kDefaultAtomCap);

/// Test helper for the one-step unwrap preservation lemma.
/// Pre: simulates(a1, a2) and b2 is a one-step unwrap of a2.
/// True iff some one-step unwrap b1 of a1 satisfies simulates(b1, b2).
bool unwrap_step_preserved(const Trace& a1, const Trace& a2, const Trace& b2,
                           int atom_cap = kDefaultAtomCap);

} // namespace sdconform

#endif
