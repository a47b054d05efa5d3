#ifndef SDCONFORM_COND_HPP
#define SDCONFORM_COND_HPP

#include <map>
#include <optional>

#include "sdconform/model.hpp"

namespace sdconform {

// Syntactic constructors; no eager simplification.
CondPtr negate(const CondPtr& c);
CondPtr conj(const CondPtr& c1, const CondPtr& c2);
CondPtr disj(const CondPtr& c1, const CondPtr& c2);

inline constexpr int kDefaultAtomCap = 20;

/// Decides c1 |=c c2: every consistent truth assignment to the atoms of the
/// two conditions that satisfies c1 also satisfies c2. Consistency encodes
/// that distinct literals denote distinct values, that =/!= on a common
/// variable are complementary, that numeric bounds over a variable must be
/// realizable by some integer, and that variable-variable order atoms over a
/// common pair follow the <, =, > trichotomy.
/// Throws AtomBudgetExceeded when more than atom_cap distinct atoms occur.
bool entails(const CondPtr& c1, const CondPtr& c2, int atom_cap = kDefaultAtomCap);

bool is_tautology(const CondPtr& c, int atom_cap = kDefaultAtomCap);
bool is_satisfiable(const CondPtr& c, int atom_cap = kDefaultAtomCap);

/// Name-to-term map, identity outside its domain. Shared by conditions and
/// diagrams (lifelines, messages, parameters, condition variables).
class Substitution {
public:
  Substitution() = default;

  /// Adds a mapping; an explicit identity mapping is dropped.
  void set(const Name& from, const Term& to);
  bool maps(const Name& n) const { return map_.count(n) != 0; }
  std::optional<Term> lookup(const Name& n) const;

  /// Applies the substitution to a name used in a position where only a
  /// name-shaped value can appear (lifelines, messages, parameters).
  Name apply_name(const Name& n) const;

  bool empty() const { return map_.empty(); }
  const std::map<Name, Term>& entries() const { return map_; }

  /// (rho2 o rho1): apply rho1 first, then rho2 to its results and to the
  /// names rho1 leaves untouched.
  static Substitution compose(const Substitution& rho2, const Substitution& rho1,
                              const std::set<Name>& domain_hint);

private:
  std::map<Name, Term> map_;
};

CondPtr substitute_cond(const CondPtr& c, const Substitution& rho);

/// Rewrites ground atoms to true/false and applies the unit laws
/// (c&&true -> c, c&&false -> false, c||true -> true, c||false -> c,
/// !true -> false, !false -> true) to a fixpoint.
CondPtr simplify(const CondPtr& c);

/// Condition variables: names occurring on either side of an atom.
std::set<Name> cond_variables(const CondPtr& c);

/// Literals occurring in atoms that mention the given name.
std::set<Literal> literals_near(const CondPtr& c, const Name& v);

} // namespace sdconform

#endif
