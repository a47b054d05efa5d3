#include "sdconform/semantics.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sdconform/errors.hpp"

namespace sdconform {

void EvalConfig::set_budget_ms(long ms) {
  if (ms <= 0) {
    has_deadline = false;
    return;
  }
  deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
  has_deadline = true;
}

void EvalConfig::check_deadline(const char* where) const {
  if (has_deadline && std::chrono::steady_clock::now() > deadline)
    throw SizeBudgetExceeded(std::string("wall-clock budget exhausted in ") +
                             where);
}

// ---------------------------------------------------------------------------
// Structural keys: injective serializations used for ordering and hashing.
// Reports re-sort by display text; these keys only fix the internal order.

namespace {

std::string trace_skey(const Trace& t) { return trace_key(t); }

std::string ttrace_skey(const TaggedTrace& t) {
  std::ostringstream out;
  for (const auto& tok : t)
    out << tok.token.key() << '@' << tok.tag.str() << '\x1e';
  return out.str();
}

// Joined keys of an already sorted obligation.
template <typename TraceVec, typename KeyFn>
std::string joined_key(const TraceVec& traces, KeyFn key) {
  std::ostringstream out;
  for (const auto& t : traces) out << key(t) << '\x1d';
  return out.str();
}

template <typename TraceT, typename KeyFn>
void sort_dedup_by_key(std::vector<TraceT>& v, KeyFn key) {
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) keyed.push_back({key(v[i]), i});
  std::sort(keyed.begin(), keyed.end());
  std::vector<TraceT> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    out.push_back(std::move(v[keyed[i].second]));
  }
  v = std::move(out);
}

} // namespace

Obligation make_obligation(std::vector<Trace> traces) {
  sort_dedup_by_key(traces, trace_skey);
  return traces;
}

SemSet make_semset(std::vector<Obligation> obligations) {
  sort_dedup_by_key(obligations, [](const Obligation& o) {
    return joined_key(o, trace_skey);
  });
  return obligations;
}

bool obligation_equal(const Obligation& a, const Obligation& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

bool semset_equal(const SemSet& a, const SemSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!obligation_equal(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// fold and minimize

namespace {

// Display-text order, the deterministic scan order for fold.
std::vector<std::size_t> text_order(const Obligation& o) {
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(o.size());
  for (std::size_t i = 0; i < o.size(); ++i)
    keyed.push_back({trace_text(o[i]), i});
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  order.reserve(o.size());
  for (auto& [k, i] : keyed) order.push_back(i);
  return order;
}

} // namespace

Obligation fold_obligation(const Obligation& o, int atom_cap) {
  std::vector<Trace> traces(o.begin(), o.end());
  bool changed = true;
  while (changed) {
    changed = false;
    auto order = text_order(traces);

    // Single-trace rule: a tautological guard token guards nothing.
    for (std::size_t oi = 0; oi < order.size() && !changed; ++oi) {
      const Trace& t = traces[order[oi]];
      for (std::size_t p = 0; p < t.size(); ++p) {
        if (!t[p].is_cond()) continue;
        if (!is_tautology(t[p].cond(), atom_cap)) continue;
        Trace folded;
        folded.reserve(t.size() - 1);
        folded.insert(folded.end(), t.begin(), t.begin() + p);
        folded.insert(folded.end(), t.begin() + p + 1, t.end());
        traces[order[oi]] = std::move(folded);
        changed = true;
        break;
      }
    }
    if (changed) {
      traces = make_obligation(std::move(traces));
      continue;
    }

    // Pair rule: alpha.c.beta and alpha.c'.beta with c v c' tautological.
    for (std::size_t oi = 0; oi < order.size() && !changed; ++oi) {
      for (std::size_t oj = oi + 1; oj < order.size() && !changed; ++oj) {
        const Trace& t1 = traces[order[oi]];
        const Trace& t2 = traces[order[oj]];
        if (t1.size() != t2.size() || t1.empty()) continue;
        for (std::size_t p = 0; p < t1.size(); ++p) {
          if (!t1[p].is_cond() || !t2[p].is_cond()) continue;
          bool same_around = true;
          for (std::size_t q = 0; q < t1.size(); ++q) {
            if (q == p) continue;
            if (!(t1[q] == t2[q])) {
              same_around = false;
              break;
            }
          }
          if (!same_around) continue;
          if (!is_tautology(disj(t1[p].cond(), t2[p].cond()), atom_cap)) continue;
          Trace folded;
          folded.reserve(t1.size() - 1);
          folded.insert(folded.end(), t1.begin(), t1.begin() + p);
          folded.insert(folded.end(), t1.begin() + p + 1, t1.end());
          std::size_t hi = std::max(order[oi], order[oj]);
          std::size_t lo = std::min(order[oi], order[oj]);
          traces.erase(traces.begin() + hi);
          traces.erase(traces.begin() + lo);
          traces.push_back(std::move(folded));
          changed = true;
          break;
        }
      }
    }
    if (changed) traces = make_obligation(std::move(traces));
  }
  return make_obligation(std::move(traces));
}

namespace {

template <typename TraceT, typename KeyFn>
std::vector<std::vector<TraceT>> minimize_generic(
    std::vector<std::vector<TraceT>> m, KeyFn key) {
  // Obligations arrive sorted and deduplicated. Drop proper supersets: for
  // small obligations probe all proper subsets against the set of keys,
  // otherwise fall back to pairwise inclusion tests.
  std::vector<std::vector<std::string>> tkeys(m.size());
  std::vector<std::string> okeys(m.size());
  std::unordered_set<std::string> present;
  for (std::size_t i = 0; i < m.size(); ++i) {
    tkeys[i].reserve(m[i].size());
    for (const auto& t : m[i]) tkeys[i].push_back(key(t));
    okeys[i] = joined_key(tkeys[i], [](const std::string& s) { return s; });
    present.insert(okeys[i]);
  }

  std::set<std::size_t> sizes_present;
  for (const auto& keys : tkeys) sizes_present.insert(keys.size());

  std::vector<bool> drop(m.size(), false);
  constexpr std::size_t kProbeLimit = 16;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& keys = tkeys[i];
    // A proper subset is strictly smaller; skip when no candidate size exists.
    if (*sizes_present.begin() >= keys.size()) continue;
    if (keys.size() <= kProbeLimit) {
      std::size_t subsets = (std::size_t{1} << keys.size());
      for (std::size_t mask = 0; mask + 1 < subsets && !drop[i]; ++mask) {
        std::size_t bits = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (!sizes_present.count(bits)) continue;
        std::string sub;
        for (std::size_t b = 0; b < keys.size(); ++b)
          if ((mask >> b) & 1) {
            sub += keys[b];
            sub += '\x1d';
          }
        if (present.count(sub)) drop[i] = true;
      }
    } else {
      for (std::size_t j = 0; j < m.size() && !drop[i]; ++j) {
        if (j == i || tkeys[j].size() >= keys.size()) continue;
        if (std::includes(keys.begin(), keys.end(), tkeys[j].begin(),
                          tkeys[j].end()))
          drop[i] = true;
      }
    }
  }

  std::vector<std::vector<TraceT>> out;
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!drop[i]) out.push_back(std::move(m[i]));
  return out;
}

} // namespace

SemSet minimize(const SemSet& m) {
  return minimize_generic(make_semset(m), trace_skey);
}

SemSet normalize(const SemSet& m, const EvalConfig& cfg) {
  std::vector<Obligation> folded;
  folded.reserve(m.size());
  for (const auto& o : m) folded.push_back(fold_obligation(o, cfg.atom_cap));
  return minimize_generic(make_semset(std::move(folded)), trace_skey);
}

// ---------------------------------------------------------------------------
// Composition machinery over tagged traces

namespace {

struct MergeFilter {
  enum class Kind { None, Seq, Block };
  Kind kind = Kind::None;
  const std::set<LabelEdge>* strict_closure = nullptr; // Block
};

void budget_count(std::size_t count, std::size_t cap, const char* what,
                  const std::string& path) {
  if (count > cap)
    throw SizeBudgetExceeded(std::string(what) + " exceeds budget of " +
                             std::to_string(cap) + " at " + path);
}

struct KeyedTrace {
  TaggedTrace trace;
  std::string key;
};

// Enumerates admissible shuffles of two tagged traces under the filter.
// Appends are pruned as soon as an ordering constraint is violated; a
// violated pair can never be repaired by later appends. Backtracking keeps
// an undo log instead of copying the bookkeeping sets.
struct TaggedMerger {
  const TaggedTrace& s1;
  const TaggedTrace& s2;
  const MergeFilter& filter;
  std::size_t cap;
  const std::string& path;

  std::vector<KeyedTrace> out;
  TaggedTrace acc;
  std::set<Name> seen2_lifelines;   // Seq
  std::set<Label> appended_labels;  // Block

  bool blocked_append(const TaggedToken& tok, bool from_left) const {
    switch (filter.kind) {
      case MergeFilter::Kind::None:
        return false;
      case MergeFilter::Kind::Seq: {
        if (!from_left) return false;
        for (const auto& n : lifelines(tok.token))
          if (seen2_lifelines.count(n)) return true;
        return false;
      }
      case MergeFilter::Kind::Block: {
        for (const auto& b : appended_labels) {
          if (b == tok.tag) continue;
          if (filter.strict_closure->count({tok.tag, b})) return true;
        }
        return false;
      }
    }
    return false;
  }

  void step(const TaggedToken& tok, bool from_left, std::size_t i,
            std::size_t j) {
    std::vector<Name> added_lifelines;
    bool added_label = false;
    if (filter.kind == MergeFilter::Kind::Seq && !from_left) {
      for (const auto& n : lifelines(tok.token))
        if (seen2_lifelines.insert(n).second) added_lifelines.push_back(n);
    }
    if (filter.kind == MergeFilter::Kind::Block)
      added_label = appended_labels.insert(tok.tag).second;
    acc.push_back(tok);
    run(i, j);
    acc.pop_back();
    for (const auto& n : added_lifelines) seen2_lifelines.erase(n);
    if (added_label) appended_labels.erase(tok.tag);
  }

  void run(std::size_t i, std::size_t j) {
    if (i == s1.size() && j == s2.size()) {
      budget_count(out.size() + 1, cap, "interleaving set", path);
      out.push_back({acc, ttrace_skey(acc)});
      return;
    }
    if (i < s1.size() && !blocked_append(s1[i], true))
      step(s1[i], true, i + 1, j);
    if (j < s2.size() && !blocked_append(s2[j], false))
      step(s2[j], false, i, j + 1);
  }
};

std::vector<KeyedTrace> admissible_merges(const TaggedTrace& s1,
                                          const TaggedTrace& s2,
                                          const MergeFilter& filter,
                                          std::size_t cap,
                                          const std::string& path) {
  TaggedMerger merger{s1, s2, filter, cap, path};
  merger.acc.reserve(s1.size() + s2.size());
  merger.run(0, 0);
  std::sort(merger.out.begin(), merger.out.end(),
            [](const KeyedTrace& a, const KeyedTrace& b) { return a.key < b.key; });
  merger.out.erase(std::unique(merger.out.begin(), merger.out.end(),
                               [](const KeyedTrace& a, const KeyedTrace& b) {
                                 return a.key == b.key;
                               }),
                   merger.out.end());
  return merger.out;
}

using TaggedSemSet = std::vector<std::vector<TaggedTrace>>;

TaggedSemSet make_tagged_semset(TaggedSemSet m) {
  for (auto& o : m) sort_dedup_by_key(o, ttrace_skey);
  sort_dedup_by_key(m, [](const std::vector<TaggedTrace>& o) {
    return joined_key(o, ttrace_skey);
  });
  return m;
}

/// One obligation per total choice of an admissible shuffle for every trace
/// pair of every obligation pair, then minimized (the flat-lift of the
/// pairwise interleave).
TaggedSemSet tagged_pairwise(const TaggedSemSet& m1, const TaggedSemSet& m2,
                             const MergeFilter& filter, const EvalConfig& cfg,
                             const std::string& path) {
  cfg.check_deadline("interleave");
  TaggedSemSet result;
  std::unordered_set<std::string> seen;
  std::size_t enumerated = 0;

  for (const auto& o1 : m1) {
    for (const auto& o2 : m2) {
      // Admissible shuffles per trace pair.
      std::vector<std::vector<KeyedTrace>> options;
      options.reserve(o1.size() * o2.size());
      bool impossible = false;
      for (const auto& s1 : o1) {
        for (const auto& s2 : o2) {
          options.push_back(admissible_merges(
              s1, s2, filter, cfg.max_traces_per_obligation, path));
          if (options.back().empty()) {
            impossible = true;
            break;
          }
        }
        if (impossible) break;
      }
      if (impossible) continue;

      std::vector<std::size_t> idx(options.size(), 0);
      std::vector<const KeyedTrace*> picks(options.size());
      while (true) {
        cfg.check_deadline("interleave choice");
        budget_count(++enumerated, cfg.max_obligations,
                     "interleave choice enumeration", path);
        for (std::size_t p = 0; p < options.size(); ++p)
          picks[p] = &options[p][idx[p]];
        std::sort(picks.begin(), picks.end(),
                  [](const KeyedTrace* a, const KeyedTrace* b) {
                    return a->key < b->key;
                  });
        std::string key;
        for (std::size_t p = 0; p < picks.size(); ++p) {
          if (p > 0 && picks[p]->key == picks[p - 1]->key) continue;
          key += picks[p]->key;
          key += '\x1d';
        }
        if (seen.insert(std::move(key)).second) {
          std::vector<TaggedTrace> image;
          image.reserve(picks.size());
          for (std::size_t p = 0; p < picks.size(); ++p) {
            if (p > 0 && picks[p]->key == picks[p - 1]->key) continue;
            image.push_back(picks[p]->trace);
          }
          budget_count(image.size(), cfg.max_traces_per_obligation,
                       "obligation size", path);
          budget_count(result.size() + 1, cfg.max_obligations,
                       "obligation count", path);
          result.push_back(std::move(image));
        }
        // Odometer.
        std::size_t p = 0;
        for (; p < options.size(); ++p) {
          if (++idx[p] < options[p].size()) break;
          idx[p] = 0;
        }
        if (p == options.size()) break;
      }
    }
  }
  return minimize_generic(make_tagged_semset(std::move(result)), ttrace_skey);
}

TaggedSemSet tag_semset(const SemSet& m, const Label& l) {
  TaggedSemSet out;
  out.reserve(m.size());
  for (const auto& o : m) {
    std::vector<TaggedTrace> to;
    to.reserve(o.size());
    for (const auto& t : o) to.push_back(tag(t, l));
    out.push_back(std::move(to));
  }
  return out;
}

SemSet untag_semset(const TaggedSemSet& m) {
  std::vector<Obligation> out;
  out.reserve(m.size());
  for (const auto& o : m) {
    std::vector<Trace> traces;
    traces.reserve(o.size());
    for (const auto& t : o) traces.push_back(untag(t));
    out.push_back(make_obligation(std::move(traces)));
  }
  return make_semset(std::move(out));
}

SemSet prefix_token(const SemSet& m, const Token& tok, const EvalConfig& cfg,
                    const std::string& path) {
  std::vector<Obligation> out;
  out.reserve(m.size());
  for (const auto& o : m) {
    std::vector<Trace> traces;
    traces.reserve(o.size());
    for (const auto& t : o) {
      budget_count(t.size() + 1, cfg.max_trace_length, "trace length", path);
      Trace p;
      p.reserve(t.size() + 1);
      p.push_back(tok);
      p.insert(p.end(), t.begin(), t.end());
      traces.push_back(std::move(p));
    }
    out.push_back(make_obligation(std::move(traces)));
  }
  return make_semset(std::move(out));
}

SemSet pairwise_union(const SemSet& m1, const SemSet& m2) {
  std::vector<Obligation> out;
  out.reserve(m1.size() * m2.size());
  for (const auto& o1 : m1)
    for (const auto& o2 : m2) {
      std::vector<Trace> traces(o1.begin(), o1.end());
      traces.insert(traces.end(), o2.begin(), o2.end());
      out.push_back(make_obligation(std::move(traces)));
    }
  return make_semset(std::move(out));
}

SemSet pairwise_concat(const SemSet& m1, const SemSet& m2,
                       const EvalConfig& cfg, const std::string& path) {
  std::vector<Obligation> out;
  out.reserve(m1.size() * m2.size());
  for (const auto& o1 : m1)
    for (const auto& o2 : m2) {
      std::vector<Trace> traces;
      traces.reserve(o1.size() * o2.size());
      for (const auto& t1 : o1)
        for (const auto& t2 : o2) {
          budget_count(t1.size() + t2.size(), cfg.max_trace_length,
                       "trace length", path);
          Trace t;
          t.reserve(t1.size() + t2.size());
          t.insert(t.end(), t1.begin(), t1.end());
          t.insert(t.end(), t2.begin(), t2.end());
          traces.push_back(std::move(t));
        }
      out.push_back(make_obligation(std::move(traces)));
    }
  return make_semset(std::move(out));
}

SemSet epsilon_semset() {
  return make_semset({make_obligation({Trace{}})});
}

bool is_epsilon_semset(const SemSet& m) {
  return m.size() == 1 && m[0].size() == 1 && m[0][0].empty();
}

// Normalization discipline: the equations for strict/critical/alt/opt carry
// a fold+minimize of their own; par/seq/block/loop only minimize inside the
// flat interleave. The default mode re-establishes domain membership by
// folding after those operators as well.
SemSet finish(SemSet m, const EvalConfig& cfg, bool equation_folds) {
  if (equation_folds || !cfg.paper_literal) return normalize(m, cfg);
  return m;
}

SemSet evaluate_rec(const DiagramPtr& d, const EvalConfig& cfg,
                    const std::string& path);

std::string cfg_memo_key(const EvalConfig& cfg) {
  std::ostringstream out;
  out << cfg.loop_bound << '|' << cfg.max_obligations << '|'
      << cfg.max_traces_per_obligation << '|' << cfg.max_trace_length << '|'
      << cfg.paper_literal << '|' << cfg.atom_cap;
  return out.str();
}

std::mutex memo_mutex;
std::unordered_map<std::string, SemSet> memo;

} // namespace

SemSet loop_eval(const CondPtr& c, const DiagramPtr& d, const EvalConfig& cfg) {
  const std::string path = "loop";
  SemSet body = evaluate_rec(d, cfg, path);
  // An effect-free body loops to nothing at every bound; keeps the
  // semantics a function of the body's semantics.
  if (!cfg.paper_literal && is_epsilon_semset(body)) return epsilon_semset();

  Token guard = Token::of_cond(c);
  Token not_guard = Token::of_cond(negate(c));
  SemSet neg = make_semset({make_obligation({Trace{not_guard}})});

  SemSet x = neg;
  for (int i = 0; i < cfg.loop_bound; ++i) {
    cfg.check_deadline("loop iteration");
    SemSet step = seq_combine(body, x, cfg);
    step = prefix_token(step, guard, cfg, path);
    x = finish(pairwise_union(step, neg), cfg, false);
  }
  return x;
}

SemSet seq_combine(const SemSet& m1, const SemSet& m2, const EvalConfig& cfg) {
  MergeFilter filter;
  filter.kind = MergeFilter::Kind::Seq;
  auto t1 = tag_semset(m1, Label::of_number(1));
  auto t2 = tag_semset(m2, Label::of_number(2));
  SemSet out = untag_semset(tagged_pairwise(t1, t2, filter, cfg, "seq"));
  return finish(std::move(out), cfg, false);
}

SemSet par_combine(const Obligation& o1, const Obligation& o2,
                   const EvalConfig& cfg) {
  MergeFilter filter;
  auto t1 = tag_semset(SemSet{o1}, Label::of_number(0));
  auto t2 = tag_semset(SemSet{o2}, Label::of_number(0));
  return untag_semset(tagged_pairwise(t1, t2, filter, cfg, "par"));
}

SemSet block_combine(const std::vector<Label>& labels,
                     const std::map<Label, SemSet>& bodies,
                     const std::set<LabelEdge>& order, const EvalConfig& cfg) {
  std::set<LabelEdge> closure;
  for (const auto& [a, b] : transitive_closure(order))
    if (!(a == b)) closure.insert({a, b});
  MergeFilter filter;
  filter.kind = MergeFilter::Kind::Block;
  filter.strict_closure = &closure;

  std::vector<Label> sorted = labels;
  std::sort(sorted.begin(), sorted.end());

  TaggedSemSet acc = tag_semset(bodies.at(sorted[0]), sorted[0]);
  acc = make_tagged_semset(std::move(acc));
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    TaggedSemSet next = tag_semset(bodies.at(sorted[i]), sorted[i]);
    acc = tagged_pairwise(acc, next, filter, cfg, "block");
  }
  return finish(untag_semset(acc), cfg, false);
}

namespace {

SemSet eval_block(const DiagramPtr& d, const EvalConfig& cfg,
                  const std::string& path) {
  std::map<Label, SemSet> bodies;
  for (const auto& [l, sub] : d->body)
    bodies[l] = evaluate_rec(sub, cfg, path + "/block[" + l.str() + "]");
  return block_combine(d->labels, bodies, d->order, cfg);
}

SemSet eval_critical(const DiagramPtr& d, const EvalConfig& cfg,
                     const std::string& path) {
  SemSet inner = evaluate_rec(d->d1, cfg, path + "/critical");
  std::vector<Obligation> unwrapped;
  unwrapped.reserve(inner.size());
  for (const auto& o : inner) {
    std::vector<Trace> traces;
    traces.reserve(o.size());
    for (const auto& t : o) traces.push_back(unwrap(t));
    unwrapped.push_back(make_obligation(std::move(traces)));
  }
  SemSet folded = normalize(make_semset(std::move(unwrapped)), cfg);
  std::vector<Obligation> wrapped;
  wrapped.reserve(folded.size());
  for (const auto& o : folded) {
    std::vector<Trace> traces;
    traces.reserve(o.size());
    for (const auto& t : o) {
      if (t.empty())
        traces.push_back(Trace{}); // an empty segment protects nothing
      else
        traces.push_back(Trace{wrap(t)});
    }
    wrapped.push_back(make_obligation(std::move(traces)));
  }
  return make_semset(std::move(wrapped));
}

SemSet evaluate_rec(const DiagramPtr& d, const EvalConfig& cfg,
                    const std::string& path) {
  cfg.check_deadline("evaluate");
  std::string key = diagram_key(d) + "\x1c" + cfg_memo_key(cfg);
  {
    std::lock_guard<std::mutex> lock(memo_mutex);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }

  SemSet result;
  switch (d->kind) {
    case Diagram::Kind::Tau:
      result = epsilon_semset();
      break;
    case Diagram::Kind::Ev:
      result = make_semset({make_obligation({Trace{Token::of_event(d->event)}})});
      break;
    case Diagram::Kind::Strict: {
      SemSet m1 = evaluate_rec(d->d1, cfg, path + "/strict.1");
      SemSet m2 = evaluate_rec(d->d2, cfg, path + "/strict.2");
      result = finish(pairwise_concat(m1, m2, cfg, path), cfg, true);
      break;
    }
    case Diagram::Kind::Critical:
      result = eval_critical(d, cfg, path);
      break;
    case Diagram::Kind::Alt: {
      SemSet m1 = evaluate_rec(d->d1, cfg, path + "/alt.1");
      SemSet m2 = evaluate_rec(d->d2, cfg, path + "/alt.2");
      SemSet left = prefix_token(m1, Token::of_cond(d->guard), cfg, path);
      SemSet right =
          prefix_token(m2, Token::of_cond(negate(d->guard)), cfg, path);
      result = finish(pairwise_union(left, right), cfg, true);
      break;
    }
    case Diagram::Kind::Opt: {
      SemSet m1 = evaluate_rec(d->d1, cfg, path + "/opt");
      SemSet left = prefix_token(m1, Token::of_cond(d->guard), cfg, path);
      SemSet right = make_semset(
          {make_obligation({Trace{Token::of_cond(negate(d->guard))}})});
      result = finish(pairwise_union(left, right), cfg, true);
      break;
    }
    case Diagram::Kind::Par: {
      SemSet m1 = evaluate_rec(d->d1, cfg, path + "/par.1");
      SemSet m2 = evaluate_rec(d->d2, cfg, path + "/par.2");
      MergeFilter filter;
      auto t1 = tag_semset(m1, Label::of_number(0));
      auto t2 = tag_semset(m2, Label::of_number(0));
      result = finish(
          untag_semset(tagged_pairwise(t1, t2, filter, cfg, path)), cfg, false);
      break;
    }
    case Diagram::Kind::Seq: {
      SemSet m1 = evaluate_rec(d->d1, cfg, path + "/seq.1");
      SemSet m2 = evaluate_rec(d->d2, cfg, path + "/seq.2");
      result = seq_combine(m1, m2, cfg);
      break;
    }
    case Diagram::Kind::Block:
      result = eval_block(d, cfg, path);
      break;
    case Diagram::Kind::Loop:
      result = loop_eval(d->guard, d->d1, cfg);
      break;
  }

  std::lock_guard<std::mutex> lock(memo_mutex);
  memo.emplace(std::move(key), result);
  return result;
}

bool contains_loop(const DiagramPtr& d) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
    case Diagram::Kind::Ev:
      return false;
    case Diagram::Kind::Loop:
      return true;
    case Diagram::Kind::Block:
      for (const auto& [l, sub] : d->body)
        if (contains_loop(sub)) return true;
      return false;
    default:
      return (d->d1 && contains_loop(d->d1)) || (d->d2 && contains_loop(d->d2));
  }
}

} // namespace

EvalResult evaluate(const DiagramPtr& d, const EvalConfig& cfg) {
  EvalResult r;
  r.sem = evaluate_rec(d, cfg, "");
  r.loop_bound_used = cfg.loop_bound;
  r.has_loop = contains_loop(d);
  return r;
}

SemSet evaluate_sem(const DiagramPtr& d, const EvalConfig& cfg) {
  return evaluate_rec(d, cfg, "");
}

std::vector<std::vector<std::string>> semset_text(const SemSet& m) {
  std::vector<std::vector<std::string>> out;
  out.reserve(m.size());
  for (const auto& o : m) {
    std::vector<std::string> texts;
    texts.reserve(o.size());
    for (const auto& t : o) texts.push_back(trace_text(t));
    std::sort(texts.begin(), texts.end());
    out.push_back(std::move(texts));
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace sdconform
