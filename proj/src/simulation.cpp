#include "sdconform/simulation.hpp"

#include <map>

namespace sdconform {

namespace {

bool trace_sim_flat(const Trace& a, const Trace& g, int atom_cap);

// Token-level base cases: events by equality, conditions by reverse
// entailment, segments recursively. A segment never matches a bare token.
bool token_sim(const Token& t1, const Token& t2, int atom_cap) {
  if (t1.kind() != t2.kind()) return false;
  switch (t1.kind()) {
    case Token::Kind::Ev:
      return t1.event() == t2.event();
    case Token::Kind::Cond:
      return entails(t2.cond(), t1.cond(), atom_cap);
    case Token::Kind::Crit:
      return trace_sim_flat(t1.segment(), t2.segment(), atom_cap);
  }
  return false;
}

// Matching of segment-free traces: a strictly increasing total map from a
// into g, leaving only conditions of g unmatched.
struct FlatMatcher {
  const Trace& a;
  const Trace& g;
  int atom_cap;
  std::map<std::pair<std::size_t, std::size_t>, bool> memo;

  bool match(std::size_t i, std::size_t j) {
    if (i == a.size()) {
      for (std::size_t k = j; k < g.size(); ++k)
        if (!g[k].is_cond()) return false;
      return true;
    }
    if (j == g.size()) return false;
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool ok = false;
    if (token_sim(a[i], g[j], atom_cap) && match(i + 1, j + 1)) ok = true;
    if (!ok && g[j].is_cond() && match(i, j + 1)) ok = true;
    memo[key] = ok;
    return ok;
  }

  // Deterministic witness: prefer matching over skipping.
  bool reconstruct(std::size_t i, std::size_t j, std::vector<std::size_t>& eta) {
    if (i == a.size()) {
      for (std::size_t k = j; k < g.size(); ++k)
        if (!g[k].is_cond()) return false;
      return true;
    }
    if (j == g.size()) return false;
    if (token_sim(a[i], g[j], atom_cap) && match(i + 1, j + 1)) {
      eta.push_back(j);
      return reconstruct(i + 1, j + 1, eta);
    }
    if (g[j].is_cond() && match(i, j + 1)) return reconstruct(i, j + 1, eta);
    return false;
  }
};

bool trace_sim_flat(const Trace& a, const Trace& g, int atom_cap) {
  FlatMatcher m{a, g, atom_cap, {}};
  return m.match(0, 0);
}

std::vector<std::size_t> crit_positions(const Trace& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i].is_crit()) out.push_back(i);
  return out;
}

Trace flatten_subset(const Trace& t, const std::vector<std::size_t>& crits,
                     std::size_t mask) {
  Trace out;
  out.reserve(t.size());
  std::size_t ci = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool flatten = false;
    if (ci < crits.size() && crits[ci] == i) {
      flatten = (mask >> ci) & 1;
      ++ci;
    }
    if (flatten)
      out.insert(out.end(), t[i].segment().begin(), t[i].segment().end());
    else
      out.push_back(t[i]);
  }
  return out;
}

} // namespace

bool simulates(const Trace& t1, const Trace& t2, int atom_cap,
               SimWitness* witness) {
  auto crits = crit_positions(t1);
  std::size_t subsets = std::size_t{1} << crits.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    Trace beta = flatten_subset(t1, crits, mask);
    FlatMatcher m{beta, t2, atom_cap, {}};
    if (!m.match(0, 0)) continue;
    if (witness) {
      witness->unwrap_choices.clear();
      for (std::size_t ci = 0; ci < crits.size(); ++ci)
        if ((mask >> ci) & 1) witness->unwrap_choices.push_back(crits[ci]);
      witness->eta.clear();
      m.reconstruct(0, 0, witness->eta);
    }
    return true;
  }
  return false;
}

bool witness_valid(const Trace& t1, const Trace& t2, const SimWitness& w,
                   int atom_cap) {
  auto crits = crit_positions(t1);
  std::size_t mask = 0;
  for (std::size_t ci = 0; ci < crits.size(); ++ci) {
    bool chosen = false;
    for (auto p : w.unwrap_choices)
      if (p == crits[ci]) chosen = true;
    if (chosen) mask |= std::size_t{1} << ci;
  }
  for (auto p : w.unwrap_choices)
    if (p >= t1.size() || !t1[p].is_crit()) return false;

  Trace beta = flatten_subset(t1, crits, mask);
  if (w.eta.size() != beta.size()) return false;
  for (std::size_t i = 0; i < w.eta.size(); ++i) {
    if (w.eta[i] >= t2.size()) return false;
    if (i > 0 && w.eta[i] <= w.eta[i - 1]) return false;
    if (!token_sim(beta[i], t2[w.eta[i]], atom_cap)) return false;
  }
  std::size_t next = 0;
  for (std::size_t j = 0; j < t2.size(); ++j) {
    if (next < w.eta.size() && w.eta[next] == j) {
      ++next;
      continue;
    }
    if (!t2[j].is_cond()) return false;
  }
  return true;
}

bool unwrap_step_preserved(const Trace& a1, const Trace& a2, const Trace& b2,
                           int atom_cap) {
  for (const auto& b1 : unwrap_steps(a1))
    if (simulates(b1, b2, atom_cap)) return true;
  return false;
}

} // namespace sdconform
