#include "sdconform/conformance.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sdconform/errors.hpp"

namespace sdconform {

DiagramPtr hide(const DiagramPtr& d, const HiddenSet& u) {
  if (u.empty()) return d;
  switch (d->kind) {
    case Diagram::Kind::Tau:
      return d;
    case Diagram::Kind::Ev:
      return u.count(d->event) ? tau() : d;
    case Diagram::Kind::Opt:
      return opt(d->guard, hide(d->d1, u));
    case Diagram::Kind::Alt:
      return alt(d->guard, hide(d->d1, u), hide(d->d2, u));
    case Diagram::Kind::Loop:
      return loop(d->guard, hide(d->d1, u));
    case Diagram::Kind::Critical:
      return critical(hide(d->d1, u));
    case Diagram::Kind::Par:
      return par(hide(d->d1, u), hide(d->d2, u));
    case Diagram::Kind::Strict:
      return strict(hide(d->d1, u), hide(d->d2, u));
    case Diagram::Kind::Seq:
      return seq(hide(d->d1, u), hide(d->d2, u));
    case Diagram::Kind::Block: {
      std::map<Label, DiagramPtr> body;
      for (const auto& [l, sub] : d->body) body[l] = hide(sub, u);
      return make_block(std::move(body), d->order);
    }
  }
  return d;
}

Event substitute_event(const Event& e, const Substitution& rho) {
  Event out = e;
  out.message = rho.apply_name(e.message);
  out.sender = rho.apply_name(e.sender);
  out.receiver = rho.apply_name(e.receiver);
  for (auto& p : out.params) p = rho.apply_name(p);
  return out;
}

DiagramPtr substitute(const DiagramPtr& d, const Substitution& rho) {
  if (rho.empty()) return d;
  switch (d->kind) {
    case Diagram::Kind::Tau:
      return d;
    case Diagram::Kind::Ev:
      return ev(substitute_event(d->event, rho));
    case Diagram::Kind::Opt:
      return opt(simplify(substitute_cond(d->guard, rho)), substitute(d->d1, rho));
    case Diagram::Kind::Alt:
      return alt(simplify(substitute_cond(d->guard, rho)),
                 substitute(d->d1, rho), substitute(d->d2, rho));
    case Diagram::Kind::Loop:
      return loop(simplify(substitute_cond(d->guard, rho)),
                  substitute(d->d1, rho));
    case Diagram::Kind::Critical:
      return critical(substitute(d->d1, rho));
    case Diagram::Kind::Par:
      return par(substitute(d->d1, rho), substitute(d->d2, rho));
    case Diagram::Kind::Strict:
      return strict(substitute(d->d1, rho), substitute(d->d2, rho));
    case Diagram::Kind::Seq:
      return seq(substitute(d->d1, rho), substitute(d->d2, rho));
    case Diagram::Kind::Block: {
      std::map<Label, DiagramPtr> body;
      for (const auto& [l, sub] : d->body) body[l] = substitute(sub, rho);
      return make_block(std::move(body), d->order);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Refinement

namespace {

struct InternedSem {
  std::vector<std::vector<std::uint32_t>> obligations; // sorted id vectors
};

struct TraceInterner {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<const Trace*> traces;

  std::uint32_t intern(const Trace& t) {
    auto key = trace_key(t);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(traces.size());
    ids.emplace(std::move(key), id);
    traces.push_back(&t);
    return id;
  }

  InternedSem intern_sem(const SemSet& m) {
    InternedSem out;
    out.obligations.reserve(m.size());
    for (const auto& o : m) {
      std::vector<std::uint32_t> ids_sorted;
      ids_sorted.reserve(o.size());
      for (const auto& t : o) ids_sorted.push_back(intern(t));
      std::sort(ids_sorted.begin(), ids_sorted.end());
      out.obligations.push_back(std::move(ids_sorted));
    }
    return out;
  }
};

} // namespace

namespace {

std::string id_set_key(const std::vector<std::uint32_t>& ids) {
  std::string out;
  out.reserve(ids.size() * 5);
  for (auto id : ids) {
    out.append(reinterpret_cast<const char*>(&id), sizeof(id));
    out += '\x1d';
  }
  return out;
}

} // namespace

RefinementResult refines_sem(const SemSet& m1, const SemSet& m2,
                             const EvalConfig& cfg) {
  RefinementResult result;
  result.loop_bound_used = cfg.loop_bound;

  TraceInterner interner;
  InternedSem i1 = interner.intern_sem(m1);
  InternedSem i2 = interner.intern_sem(m2);

  std::unordered_map<std::string, std::size_t> m2_by_key;
  for (std::size_t j = 0; j < m2.size(); ++j)
    m2_by_key.emplace(id_set_key(i2.obligations[j]), j);

  // Scan candidates smaller obligations first; a covered obligation needs
  // every one of its traces simulated, so small ones succeed or fail fast.
  std::vector<std::size_t> order2(m2.size());
  for (std::size_t j = 0; j < order2.size(); ++j) order2[j] = j;
  std::sort(order2.begin(), order2.end(), [&](std::size_t a, std::size_t b) {
    return i2.obligations[a].size() != i2.obligations[b].size()
               ? i2.obligations[a].size() < i2.obligations[b].size()
               : a < b;
  });

  std::map<std::pair<std::uint32_t, std::uint32_t>, bool> sim_memo;
  auto sim = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b) return true;
    auto key = std::make_pair(a, b);
    auto it = sim_memo.find(key);
    if (it != sim_memo.end()) return it->second;
    bool ok =
        simulates(*interner.traces[a], *interner.traces[b], cfg.atom_cap);
    sim_memo.emplace(key, ok);
    return ok;
  };

  for (std::size_t i = 0; i < m1.size(); ++i) {
    cfg.check_deadline("refinement");
    const auto& o1 = i1.obligations[i];
    bool covered = false;
    RefinementWitness witness;
    witness.obligation1 = i;

    // Reflexivity fast paths: an obligation of D2 equal to this one, or
    // equal to this one minus its condition-prefixed traces, is covered by
    // identity matching.
    auto try_subset = [&](const std::vector<std::uint32_t>& ids) {
      if (covered || ids.empty()) return;
      auto it = m2_by_key.find(id_set_key(ids));
      if (it == m2_by_key.end()) return;
      std::size_t j = it->second;
      covered = true;
      witness.obligation2 = j;
      witness.trace_choice.clear();
      for (const auto& t2 : m2[j]) {
        std::uint32_t id = interner.intern(t2);
        std::size_t k = 0;
        for (; k < m1[i].size(); ++k)
          if (interner.intern(m1[i][k]) == id) break;
        witness.trace_choice.push_back(k);
      }
    };
    try_subset(o1);
    {
      std::vector<std::uint32_t> without_guarded;
      for (std::size_t k = 0; k < m1[i].size(); ++k)
        if (m1[i][k].empty() || !m1[i][k].front().is_cond())
          without_guarded.push_back(interner.intern(m1[i][k]));
      std::sort(without_guarded.begin(), without_guarded.end());
      if (without_guarded.size() != o1.size()) try_subset(without_guarded);
    }

    for (std::size_t oj = 0; oj < order2.size() && !covered; ++oj) {
      std::size_t j = order2[oj];
      const auto& o2 = m2[j];
      std::vector<std::size_t> choice;
      choice.reserve(o2.size());
      bool all = true;
      for (const auto& t2 : o2) {
        std::uint32_t id2 = interner.intern(t2);
        bool found = false;
        for (std::size_t k = 0; k < m1[i].size(); ++k) {
          if (sim(interner.intern(m1[i][k]), id2)) {
            choice.push_back(k);
            found = true;
            break;
          }
        }
        if (!found) {
          all = false;
          break;
        }
      }
      if (all) {
        covered = true;
        witness.obligation2 = j;
        witness.trace_choice = std::move(choice);
      }
    }

    if (!covered) {
      result.holds = false;
      result.failing_obligation = i;
      result.witnesses.clear();
      return result;
    }
    result.witnesses.push_back(std::move(witness));
  }
  result.holds = true;
  return result;
}

RefinementResult refines(const DiagramPtr& d1, const DiagramPtr& d2,
                         const EvalConfig& cfg) {
  EvalResult r1 = evaluate(d1, cfg);
  EvalResult r2 = evaluate(d2, cfg);
  RefinementResult result = refines_sem(r1.sem, r2.sem, cfg);
  result.has_loop = r1.has_loop || r2.has_loop;
  return result;
}

// ---------------------------------------------------------------------------
// Conformance

std::string ConformanceWitness::key() const {
  std::ostringstream out;
  for (const auto& [from, to] : rho.entries())
    out << from << "->" << term_key(to) << ';';
  out << '|';
  for (const auto& e : hidden) out << e.text() << ';';
  return out.str();
}

ConformanceResult conforms(const DiagramPtr& d1, const DiagramPtr& d2,
                           const Substitution& rho, const HiddenSet& u,
                           const EvalConfig& cfg) {
  auto evts1 = events_of(d1);
  for (const auto& e : u)
    if (!evts1.count(e))
      throw InvalidHiddenSetError("hidden event " + e.text() +
                                  " does not occur in the first diagram");

  ConformanceResult result;
  result.witness.rho = rho;
  result.witness.hidden = u;
  result.witness.loop_bound_used = cfg.loop_bound;

  auto evts2 = events_of(d2);
  result.disjointness_ok = true;
  for (const auto& e : u) {
    Event mapped = substitute_event(e, rho);
    if (evts2.count(mapped)) {
      result.disjointness_ok = false;
      result.clashing_events.push_back(mapped);
    }
  }
  if (!result.disjointness_ok) {
    result.holds = false;
    return result;
  }

  DiagramPtr d1p = substitute(hide(d1, u), rho);
  result.witness.refinement = refines(d1p, d2, cfg);
  result.holds = result.witness.refinement.holds;
  result.witness.verified = result.holds;
  return result;
}

// ---------------------------------------------------------------------------
// Witness inference

namespace {

struct MessageInfo {
  Name name;
  std::vector<Event> events; // sorted
  std::size_t arity = 0;
};

std::vector<MessageInfo> message_table(const DiagramPtr& d) {
  std::map<Name, MessageInfo> by_name;
  for (const auto& e : events_of(d)) {
    auto& info = by_name[e.message];
    info.name = e.message;
    info.arity = e.params.size();
    info.events.push_back(e);
  }
  std::vector<MessageInfo> out;
  out.reserve(by_name.size());
  for (auto& [n, info] : by_name) {
    std::sort(info.events.begin(), info.events.end());
    out.push_back(std::move(info));
  }
  return out;
}

struct SearchState {
  // Partial map and the set of already-used lifeline targets (the lifeline
  // component must be injective).
  std::map<Name, Term> map;
  std::set<Name> used_lifeline_targets;

  bool bind(const Name& from, const Term& to, bool lifeline) {
    auto it = map.find(from);
    if (it != map.end()) return it->second == to;
    if (lifeline) {
      if (from == to.text) {
        // Identity lifeline matches stay implicit but still block the target.
        if (used_lifeline_targets.count(to.text)) return false;
        map.emplace(from, to);
        used_lifeline_targets.insert(to.text);
        return true;
      }
      if (used_lifeline_targets.count(to.text)) return false;
      used_lifeline_targets.insert(to.text);
    }
    map.emplace(from, to);
    return true;
  }
};

Substitution to_substitution(const std::map<Name, Term>& map) {
  Substitution rho;
  for (const auto& [from, to] : map) rho.set(from, to);
  return rho;
}

void collect_guards(const DiagramPtr& d, std::vector<CondPtr>& out) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
    case Diagram::Kind::Ev:
      return;
    case Diagram::Kind::Opt:
    case Diagram::Kind::Loop:
      out.push_back(d->guard);
      collect_guards(d->d1, out);
      return;
    case Diagram::Kind::Alt:
      out.push_back(d->guard);
      collect_guards(d->d1, out);
      collect_guards(d->d2, out);
      return;
    case Diagram::Kind::Block:
      for (const auto& [l, sub] : d->body) collect_guards(sub, out);
      return;
    default:
      collect_guards(d->d1, out);
      if (d->d2) collect_guards(d->d2, out);
      return;
  }
}

struct InferEngine {
  const DiagramPtr& d1;
  const DiagramPtr& d2;
  const InferConfig& cfg;

  std::vector<MessageInfo> msgs1;
  std::vector<MessageInfo> msgs2;
  std::set<Name> lifelines2;
  std::set<Event> evts2;

  std::size_t attempts = 0;
  bool budget_hit = false;
  std::map<std::string, ConformanceWitness> found;

  void charge() {
    if (++attempts > cfg.max_candidates) {
      budget_hit = true;
      throw SearchBudgetExceeded("candidate budget exhausted");
    }
  }

  // Try to bind one D1 message onto one D2 message: arities equal, events
  // pair up by kind with compatible endpoint and parameter maps.
  bool bind_message(const MessageInfo& m1, const MessageInfo& m2,
                    SearchState& st) {
    if (m1.arity != m2.arity) return false;
    if (m1.events.size() != m2.events.size()) return false;
    if (!st.bind(m1.name, Term::name(m2.name), false)) return false;
    for (std::size_t i = 0; i < m1.events.size(); ++i) {
      const Event& e1 = m1.events[i];
      const Event& e2 = m2.events[i];
      if (e1.kind != e2.kind) return false;
      if (!st.bind(e1.sender, Term::name(e2.sender), true)) return false;
      if (!st.bind(e1.receiver, Term::name(e2.receiver), true)) return false;
      for (std::size_t p = 0; p < e1.params.size(); ++p)
        if (!st.bind(e1.params[p], Term::name(e2.params[p]), false))
          return false;
    }
    return true;
  }

  HiddenSet hidden_for(const SearchState& st) {
    HiddenSet u;
    for (const auto& m1 : msgs1) {
      auto it = st.map.find(m1.name);
      bool mapped_to_message = false;
      if (it != st.map.end() && !it->second.is_literal) {
        for (const auto& m2 : msgs2)
          if (m2.name == it->second.text) mapped_to_message = true;
      }
      if (!mapped_to_message)
        u.insert(m1.events.begin(), m1.events.end());
    }
    return u;
  }

  // Candidate values for an unmapped guard variable: leave it alone, rename
  // it to one of D2's guard variables, assign a literal occurring next to it
  // (plus boolean complements), or the distinguished `other`.
  std::vector<std::optional<Term>> var_candidates(
      const Name& v, const std::set<Name>& vars2,
      const std::vector<CondPtr>& guards1) {
    std::vector<std::optional<Term>> out;
    out.push_back(std::nullopt);
    for (const auto& w : vars2) out.push_back(Term::name(w));
    std::set<Literal> lits;
    for (const auto& g : guards1)
      for (const auto& l : literals_near(g, v)) lits.insert(l);
    std::set<Literal> with_complements = lits;
    for (const auto& l : lits) {
      if (l.kind == Literal::Kind::Boolean)
        with_complements.insert(
            make_literal(l.text == "true" ? "false" : "true"));
    }
    for (const auto& l : with_complements) out.push_back(Term::literal(l));
    out.push_back(Term::literal(other_literal()));
    return out;
  }

  void try_candidate(const SearchState& st, const HiddenSet& u) {
    charge();
    Substitution rho = to_substitution(st.map);

    // Disjointness first; it is cheap.
    for (const auto& e : u)
      if (evts2.count(substitute_event(e, rho))) return;

    DiagramPtr d1p = substitute(hide(d1, u), rho);

    // Bound-zero refinement is a cheap necessary filter in this search
    // space: unrolled loops only add guarded copies of the bound-zero
    // obligations on both sides.
    EvalConfig zero = cfg.eval;
    zero.loop_bound = 0;
    if (!refines(d1p, d2, zero).holds) return;

    RefinementResult full = refines(d1p, d2, cfg.eval);
    if (!full.holds) return;

    ConformanceWitness w;
    w.rho = rho;
    w.hidden = u;
    w.loop_bound_used = cfg.eval.loop_bound;
    w.verified = true;
    w.refinement = full;
    found.emplace(w.key(), std::move(w));
  }

  // Assign guard variables over subsets of increasing size; once some size
  // yields witnesses for this base, larger assignments are not explored.
  void assign_guard_vars(const SearchState& base, const HiddenSet& u) {
    std::vector<CondPtr> guards1;
    collect_guards(d1, guards1);
    std::set<Name> vars2;
    {
      std::vector<CondPtr> guards2;
      collect_guards(d2, guards2);
      for (const auto& g : guards2)
        for (const auto& v : cond_variables(g)) vars2.insert(v);
    }
    std::vector<Name> vars;
    for (const auto& g : guards1)
      for (const auto& v : cond_variables(g))
        if (!base.map.count(v) &&
            std::find(vars.begin(), vars.end(), v) == vars.end())
          vars.push_back(v);
    std::sort(vars.begin(), vars.end());

    std::vector<std::vector<std::optional<Term>>> cands;
    cands.reserve(vars.size());
    for (const auto& v : vars)
      cands.push_back(var_candidates(v, vars2, guards1));

    std::size_t before = found.size();
    for (std::size_t size = 0; size <= vars.size(); ++size) {
      // All assignments giving exactly `size` variables a value.
      std::vector<std::size_t> idx(vars.size(), 0);
      while (true) {
        std::size_t assigned = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
          if (idx[i] != 0) ++assigned;
        if (assigned == size) {
          SearchState st = base;
          bool ok = true;
          for (std::size_t i = 0; i < vars.size() && ok; ++i) {
            if (idx[i] == 0) continue;
            const auto& cand = cands[i][idx[i]];
            ok = st.bind(vars[i], *cand, false);
          }
          if (ok) try_candidate(st, u);
        }
        std::size_t p = 0;
        for (; p < vars.size(); ++p) {
          if (++idx[p] < cands[p].size()) break;
          idx[p] = 0;
        }
        if (p == vars.size()) break;
      }
      if (found.size() > before) break;
    }
  }

  // Depth-first matching of D2 messages to distinct D1 messages.
  void match_messages(std::size_t i, SearchState& st,
                      std::set<Name>& used_msgs) {
    if (i == msgs2.size()) {
      assign_guard_vars(st, hidden_for(st));
      return;
    }
    const auto& m2 = msgs2[i];
    for (const auto& m1 : msgs1) {
      if (used_msgs.count(m1.name)) continue;
      SearchState saved = st;
      if (bind_message(m1, m2, st)) {
        used_msgs.insert(m1.name);
        match_messages(i + 1, st, used_msgs);
        used_msgs.erase(m1.name);
      }
      st = std::move(saved);
    }
  }

  InferResult run() {
    msgs1 = message_table(d1);
    msgs2 = message_table(d2);
    lifelines2 = lifelines_of(d2);
    evts2 = events_of(d2);

    InferResult result;
    try {
      SearchState st;
      std::set<Name> used;
      match_messages(0, st, used);
    } catch (const SearchBudgetExceeded&) {
      result.partial = true;
    }

    for (auto& [key, w] : found) result.witnesses.push_back(std::move(w));
    result.search_space_note =
        "search space: every D2 message bound to a distinct D1 message with "
        "equal arity and kind/endpoint-compatible events (lifeline map "
        "injective); events of unbound D1 messages hidden; unmapped guard "
        "variables assigned, in minimal numbers per message binding, from D2 "
        "guard variables, literals adjacent to the variable, boolean "
        "complements, and `other`; candidates filtered by hidden-event "
        "disjointness and bound-0 refinement before the full check";
    return result;
  }
};

} // namespace

InferResult infer(const DiagramPtr& d1, const DiagramPtr& d2,
                  const InferConfig& cfg) {
  InferEngine engine{d1, d2, cfg};
  return engine.run();
}

} // namespace sdconform
