#include "sdconform/cond.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include "sdconform/errors.hpp"

namespace sdconform {

CondPtr negate(const CondPtr& c) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Not;
  n->a = c;
  return n;
}

CondPtr conj(const CondPtr& c1, const CondPtr& c2) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::And;
  n->a = c1;
  n->b = c2;
  return n;
}

CondPtr disj(const CondPtr& c1, const CondPtr& c2) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Or;
  n->a = c1;
  n->b = c2;
  return n;
}

// ---------------------------------------------------------------------------
// Ground evaluation

namespace {

bool literal_is_number(const Term& t) {
  return t.is_literal && t.lit_kind == Literal::Kind::Number;
}

long number_value(const Term& t) { return std::stol(t.text); }

// Distinct literals denote distinct values. Order is integer order on
// numbers; for non-numeric pairs <= degenerates to equality and < to false.
bool eval_ground_atom(const Term& lhs, Rel rel, const Term& rhs) {
  bool same = lhs.text == rhs.text && lhs.lit_kind == rhs.lit_kind;
  if (literal_is_number(lhs) && literal_is_number(rhs)) {
    long a = number_value(lhs), b = number_value(rhs);
    switch (rel) {
      case Rel::Eq: return a == b;
      case Rel::Ne: return a != b;
      case Rel::Le: return a <= b;
      case Rel::Lt: return a < b;
    }
  }
  switch (rel) {
    case Rel::Eq: return same;
    case Rel::Ne: return !same;
    case Rel::Le: return same;
    case Rel::Lt: return false;
  }
  return false;
}

} // namespace

// ---------------------------------------------------------------------------
// Entailment: enumeration of consistent assignments

namespace {

// Solver view of an atom. Ground atoms are folded away before enumeration.
struct SolverAtom {
  Term lhs;
  Rel rel = Rel::Eq;
  Term rhs;

  bool var_var() const { return !lhs.is_literal && !rhs.is_literal; }

  // Identity key; = and != are symmetric in their sides.
  std::string key() const {
    Term a = lhs, b = rhs;
    if ((rel == Rel::Eq || rel == Rel::Ne) && var_var() && b.text < a.text)
      std::swap(a, b);
    std::ostringstream out;
    out << (a.is_literal ? "L" : "N") << a.text << '\x1f' << static_cast<int>(rel)
        << '\x1f' << (b.is_literal ? "L" : "N") << b.text;
    return out.str();
  }
};

void collect_atoms(const CondPtr& c, std::map<std::string, SolverAtom>& atoms) {
  switch (c->kind) {
    case Cond::Kind::True:
    case Cond::Kind::False:
      return;
    case Cond::Kind::Atom: {
      if (c->lhs.is_literal && c->rhs.is_literal) return; // ground
      SolverAtom a{c->lhs, c->rel, c->rhs};
      atoms.emplace(a.key(), a);
      return;
    }
    case Cond::Kind::Not:
      collect_atoms(c->a, atoms);
      return;
    case Cond::Kind::And:
    case Cond::Kind::Or:
      collect_atoms(c->a, atoms);
      collect_atoms(c->b, atoms);
      return;
  }
}

using Assignment = std::vector<bool>;

bool eval_cond(const CondPtr& c, const std::vector<SolverAtom>& atoms,
               const std::map<std::string, std::size_t>& index,
               const Assignment& assign) {
  switch (c->kind) {
    case Cond::Kind::True: return true;
    case Cond::Kind::False: return false;
    case Cond::Kind::Atom: {
      if (c->lhs.is_literal && c->rhs.is_literal)
        return eval_ground_atom(c->lhs, c->rel, c->rhs);
      SolverAtom a{c->lhs, c->rel, c->rhs};
      return assign[index.at(a.key())];
    }
    case Cond::Kind::Not:
      return !eval_cond(c->a, atoms, index, assign);
    case Cond::Kind::And:
      return eval_cond(c->a, atoms, index, assign) &&
             eval_cond(c->b, atoms, index, assign);
    case Cond::Kind::Or:
      return eval_cond(c->a, atoms, index, assign) ||
             eval_cond(c->b, atoms, index, assign);
  }
  return false;
}

// Candidate values a variable group may take during feasibility checking.
struct Value {
  enum class Kind { Lit, Int, Fresh } kind = Kind::Fresh;
  Literal lit;
  long num = 0;

  bool is_number() const {
    return kind == Kind::Int ||
           (kind == Kind::Lit && lit.kind == Literal::Kind::Number);
  }
  long number() const { return kind == Kind::Int ? num : std::stol(lit.text); }
  bool equals_literal(const Term& t) const {
    if (kind == Kind::Fresh) return false;
    if (kind == Kind::Int)
      return t.lit_kind == Literal::Kind::Number && number_value(t) == num;
    return lit.text == t.text && lit.kind == t.lit_kind;
  }
};

// Normalized variable-vs-literal constraint, var on the left.
enum class VarOp { Eq, Ne, Le, Lt, Ge, Gt };

bool value_satisfies(const Value& v, VarOp op, const Term& lit) {
  switch (op) {
    case VarOp::Eq: return v.equals_literal(lit);
    case VarOp::Ne: return !v.equals_literal(lit);
    case VarOp::Le:
    case VarOp::Lt:
    case VarOp::Ge:
    case VarOp::Gt: {
      if (!v.is_number() || !literal_is_number(lit)) return false;
      long a = v.number(), b = number_value(lit);
      switch (op) {
        case VarOp::Le: return a <= b;
        case VarOp::Lt: return a < b;
        case VarOp::Ge: return a >= b;
        case VarOp::Gt: return a > b;
        default: return false;
      }
    }
  }
  return false;
}

struct UnionFind {
  std::map<Name, Name> parent;
  const Name& find(const Name& n) {
    auto it = parent.find(n);
    if (it == parent.end() || it->second == n) {
      parent[n] = n;
      return parent[n];
    }
    Name root = find(it->second);
    parent[n] = root;
    return parent[n];
  }
  void merge(const Name& a, const Name& b) {
    Name ra = find(a), rb = find(b);
    if (ra != rb) parent[ra] = rb;
  }
};

// Relation of a variable pair under an assignment must be one of <, =, >.
struct PairAtoms {
  // op as written with (a, b) = canonical (lex-ordered) pair
  std::vector<std::pair<VarOp, bool>> facts; // (op, truth)
};

bool relation_matches(int relation /* -1:<, 0:=, 1:> */, VarOp op, bool truth) {
  bool value = false;
  switch (op) {
    case VarOp::Eq: value = relation == 0; break;
    case VarOp::Ne: value = relation != 0; break;
    case VarOp::Le: value = relation <= 0; break;
    case VarOp::Lt: value = relation < 0; break;
    case VarOp::Ge: value = relation >= 0; break;
    case VarOp::Gt: value = relation > 0; break;
  }
  return value == truth;
}

VarOp flip(VarOp op) {
  switch (op) {
    case VarOp::Le: return VarOp::Ge;
    case VarOp::Lt: return VarOp::Gt;
    case VarOp::Ge: return VarOp::Le;
    case VarOp::Gt: return VarOp::Lt;
    default: return op;
  }
}

VarOp rel_to_varop(Rel r) {
  switch (r) {
    case Rel::Eq: return VarOp::Eq;
    case Rel::Ne: return VarOp::Ne;
    case Rel::Le: return VarOp::Le;
    case Rel::Lt: return VarOp::Lt;
  }
  return VarOp::Eq;
}

bool consistent(const std::vector<SolverAtom>& atoms, const Assignment& assign) {
  // Merge variables forced equal, then recheck until stable.
  UnionFind uf;
  for (const auto& a : atoms)
    if (a.var_var()) {
      uf.find(a.lhs.text);
      uf.find(a.rhs.text);
    } else {
      uf.find(a.lhs.is_literal ? a.rhs.text : a.lhs.text);
    }

  for (bool changed = true; changed;) {
    changed = false;

    // Group variable-variable facts by representative pair.
    std::map<std::pair<Name, Name>, PairAtoms> pairs;
    bool self_conflict = false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      if (!a.var_var()) continue;
      Name ra = uf.find(a.lhs.text), rb = uf.find(a.rhs.text);
      VarOp op = rel_to_varop(a.rel);
      if (ra == rb) {
        // Same value on both sides: = and <= hold, != and < do not.
        bool required = op == VarOp::Eq || op == VarOp::Le || op == VarOp::Ge;
        if (assign[i] != required) self_conflict = true;
        continue;
      }
      if (rb < ra) {
        std::swap(ra, rb);
        op = flip(op);
      }
      pairs[{ra, rb}].facts.push_back({op, assign[i]});
    }
    if (self_conflict) return false;

    for (const auto& [pr, pa] : pairs) {
      bool lt_ok = true, eq_ok = true, gt_ok = true;
      for (const auto& [op, truth] : pa.facts) {
        lt_ok = lt_ok && relation_matches(-1, op, truth);
        eq_ok = eq_ok && relation_matches(0, op, truth);
        gt_ok = gt_ok && relation_matches(1, op, truth);
      }
      if (!lt_ok && !eq_ok && !gt_ok) return false;
      if (eq_ok && !lt_ok && !gt_ok) {
        uf.merge(pr.first, pr.second);
        changed = true;
      }
    }
  }

  // Per-group feasibility against literals.
  std::map<Name, std::vector<std::pair<std::size_t, bool>>> group_atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (a.var_var()) continue;
    Name v = a.lhs.is_literal ? a.rhs.text : a.lhs.text;
    group_atoms[uf.find(v)].push_back({i, assign[i]});
  }

  for (const auto& [rep, members] : group_atoms) {
    std::vector<Value> candidates;
    candidates.push_back(Value{Value::Kind::Fresh, {}, 0});
    for (const auto& [i, truth] : members) {
      const auto& a = atoms[i];
      const Term& lit = a.lhs.is_literal ? a.lhs : a.rhs;
      candidates.push_back(Value{Value::Kind::Lit, lit.as_literal(), 0});
      if (literal_is_number(lit)) {
        long k = number_value(lit);
        candidates.push_back(Value{Value::Kind::Int, {}, k - 1});
        candidates.push_back(Value{Value::Kind::Int, {}, k + 1});
      }
    }
    bool feasible = false;
    for (const auto& cand : candidates) {
      bool ok = true;
      for (const auto& [i, truth] : members) {
        const auto& a = atoms[i];
        bool var_left = !a.lhs.is_literal;
        VarOp op = rel_to_varop(a.rel);
        if (!var_left) op = flip(op);
        const Term& lit = var_left ? a.rhs : a.lhs;
        if (value_satisfies(cand, op, lit) != truth) {
          ok = false;
          break;
        }
      }
      if (ok) {
        feasible = true;
        break;
      }
    }
    if (!feasible) return false;
  }
  return true;
}

std::mutex entail_cache_mutex;
std::map<std::pair<std::string, std::string>, bool> entail_cache;

} // namespace

bool entails(const CondPtr& c1, const CondPtr& c2, int atom_cap) {
  std::pair<std::string, std::string> cache_key{cond_text(c1), cond_text(c2)};
  {
    std::lock_guard<std::mutex> lock(entail_cache_mutex);
    auto it = entail_cache.find(cache_key);
    if (it != entail_cache.end()) return it->second;
  }

  std::map<std::string, SolverAtom> atom_map;
  collect_atoms(c1, atom_map);
  collect_atoms(c2, atom_map);
  if (static_cast<int>(atom_map.size()) > atom_cap)
    throw AtomBudgetExceeded("entailment query has " +
                             std::to_string(atom_map.size()) +
                             " atoms, cap is " + std::to_string(atom_cap));

  std::vector<SolverAtom> atoms;
  std::map<std::string, std::size_t> index;
  for (const auto& [key, a] : atom_map) {
    index[key] = atoms.size();
    atoms.push_back(a);
  }

  bool result = true;
  std::size_t n = atoms.size();
  Assignment assign(n, false);
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    for (std::size_t i = 0; i < n; ++i) assign[i] = (bits >> i) & 1;
    if (!eval_cond(c1, atoms, index, assign)) continue;
    if (eval_cond(c2, atoms, index, assign)) continue;
    if (!consistent(atoms, assign)) continue;
    result = false;
    break;
  }

  std::lock_guard<std::mutex> lock(entail_cache_mutex);
  entail_cache.emplace(cache_key, result);
  return result;
}

bool is_tautology(const CondPtr& c, int atom_cap) {
  return entails(true_cond(), c, atom_cap);
}

bool is_satisfiable(const CondPtr& c, int atom_cap) {
  return !entails(c, false_cond(), atom_cap);
}

// ---------------------------------------------------------------------------
// Substitution

void Substitution::set(const Name& from, const Term& to) {
  if (!to.is_literal && to.text == from) {
    map_.erase(from);
    return;
  }
  map_[from] = to;
}

std::optional<Term> Substitution::lookup(const Name& n) const {
  auto it = map_.find(n);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Name Substitution::apply_name(const Name& n) const {
  auto it = map_.find(n);
  return it == map_.end() ? n : it->second.text;
}

Substitution Substitution::compose(const Substitution& rho2,
                                   const Substitution& rho1,
                                   const std::set<Name>& domain_hint) {
  Substitution out;
  std::set<Name> domain = domain_hint;
  for (const auto& [n, t] : rho1.entries()) domain.insert(n);
  for (const auto& [n, t] : rho2.entries()) domain.insert(n);
  for (const auto& n : domain) {
    Term mid = Term::name(n);
    if (auto t1 = rho1.lookup(n)) mid = *t1;
    Term fin = mid;
    if (!mid.is_literal) {
      if (auto t2 = rho2.lookup(mid.text)) fin = *t2;
    }
    out.set(n, fin);
  }
  return out;
}

namespace {

Term substitute_term(const Term& t, const Substitution& rho) {
  if (t.is_literal) return t;
  if (auto m = rho.lookup(t.text)) return *m;
  return t;
}

} // namespace

CondPtr substitute_cond(const CondPtr& c, const Substitution& rho) {
  switch (c->kind) {
    case Cond::Kind::True:
    case Cond::Kind::False:
      return c;
    case Cond::Kind::Atom:
      return atom(substitute_term(c->lhs, rho), c->rel,
                  substitute_term(c->rhs, rho));
    case Cond::Kind::Not:
      return negate(substitute_cond(c->a, rho));
    case Cond::Kind::And:
      return conj(substitute_cond(c->a, rho), substitute_cond(c->b, rho));
    case Cond::Kind::Or:
      return disj(substitute_cond(c->a, rho), substitute_cond(c->b, rho));
  }
  return c;
}

CondPtr simplify(const CondPtr& c) {
  switch (c->kind) {
    case Cond::Kind::True:
    case Cond::Kind::False:
      return c;
    case Cond::Kind::Atom:
      if (c->lhs.is_literal && c->rhs.is_literal)
        return eval_ground_atom(c->lhs, c->rel, c->rhs) ? true_cond()
                                                        : false_cond();
      return c;
    case Cond::Kind::Not: {
      CondPtr a = simplify(c->a);
      if (a->kind == Cond::Kind::True) return false_cond();
      if (a->kind == Cond::Kind::False) return true_cond();
      return a == c->a ? c : negate(a);
    }
    case Cond::Kind::And: {
      CondPtr a = simplify(c->a), b = simplify(c->b);
      if (a->kind == Cond::Kind::False || b->kind == Cond::Kind::False)
        return false_cond();
      if (a->kind == Cond::Kind::True) return b;
      if (b->kind == Cond::Kind::True) return a;
      return (a == c->a && b == c->b) ? c : conj(a, b);
    }
    case Cond::Kind::Or: {
      CondPtr a = simplify(c->a), b = simplify(c->b);
      if (a->kind == Cond::Kind::True || b->kind == Cond::Kind::True)
        return true_cond();
      if (a->kind == Cond::Kind::False) return b;
      if (b->kind == Cond::Kind::False) return a;
      return (a == c->a && b == c->b) ? c : disj(a, b);
    }
  }
  return c;
}

namespace {

void visit_atoms(const CondPtr& c,
                 const std::function<void(const Cond&)>& fn) {
  switch (c->kind) {
    case Cond::Kind::Atom:
      fn(*c);
      return;
    case Cond::Kind::Not:
      visit_atoms(c->a, fn);
      return;
    case Cond::Kind::And:
    case Cond::Kind::Or:
      visit_atoms(c->a, fn);
      visit_atoms(c->b, fn);
      return;
    default:
      return;
  }
}

} // namespace

std::set<Name> cond_variables(const CondPtr& c) {
  std::set<Name> out;
  visit_atoms(c, [&](const Cond& a) {
    if (!a.lhs.is_literal) out.insert(a.lhs.text);
    if (!a.rhs.is_literal) out.insert(a.rhs.text);
  });
  return out;
}

std::set<Literal> literals_near(const CondPtr& c, const Name& v) {
  std::set<Literal> out;
  visit_atoms(c, [&](const Cond& a) {
    bool mentions = (!a.lhs.is_literal && a.lhs.text == v) ||
                    (!a.rhs.is_literal && a.rhs.text == v);
    if (!mentions) return;
    if (a.lhs.is_literal) out.insert(a.lhs.as_literal());
    if (a.rhs.is_literal) out.insert(a.rhs.as_literal());
  });
  return out;
}

} // namespace sdconform
