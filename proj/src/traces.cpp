#include "sdconform/traces.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "sdconform/errors.hpp"

namespace sdconform {

namespace {

std::string token_display(const Token::Kind kind, const Event& event,
                          const CondPtr& cond, const Trace& segment) {
  switch (kind) {
    case Token::Kind::Ev:
      return event.text();
    case Token::Kind::Cond:
      return "[" + cond_text(cond) + "]";
    case Token::Kind::Crit: {
      std::ostringstream out;
      out << "<< ";
      bool first = true;
      for (const auto& t : segment) {
        if (!first) out << "·";
        first = false;
        out << t.text();
      }
      out << " >>";
      return out.str();
    }
  }
  return "";
}

std::string token_structural(const Token::Kind kind, const Event& event,
                             const CondPtr& cond, const Trace& segment) {
  switch (kind) {
    case Token::Kind::Ev:
      return "E" + event.text();
    case Token::Kind::Cond:
      return "C" + cond_key(cond);
    case Token::Kind::Crit: {
      std::string out = "K[";
      for (const auto& t : segment) out += t.key();
      out += ']';
      return out;
    }
  }
  return "";
}

// Event and condition tokens recur constantly during evaluation; share one
// payload per distinct token.
std::mutex token_pool_mutex;
std::unordered_map<std::string, std::shared_ptr<const void>>& token_pool() {
  static std::unordered_map<std::string, std::shared_ptr<const void>> pool;
  return pool;
}

} // namespace

Token Token::intern(Data data) {
  data.text = token_display(data.kind, data.event, data.cond, data.segment);
  data.skey = token_structural(data.kind, data.event, data.cond, data.segment);
  if (data.kind != Kind::Crit) {
    std::lock_guard<std::mutex> lock(token_pool_mutex);
    auto& pool = token_pool();
    auto it = pool.find(data.skey);
    if (it != pool.end())
      return Token(std::static_pointer_cast<const Data>(it->second));
    auto ptr = std::make_shared<const Data>(std::move(data));
    pool.emplace(ptr->skey, ptr);
    return Token(ptr);
  }
  return Token(std::make_shared<const Data>(std::move(data)));
}

Token Token::of_event(Event e) {
  Data d;
  d.kind = Kind::Ev;
  d.event = std::move(e);
  return intern(std::move(d));
}

Token Token::of_cond(CondPtr c) {
  Data d;
  d.kind = Kind::Cond;
  d.cond = std::move(c);
  return intern(std::move(d));
}

Token Token::of_crit(Trace segment) {
  for (const auto& s : segment)
    if (s.is_crit())
      throw NestedCriticalError("critical segments cannot nest");
  Data d;
  d.kind = Kind::Crit;
  d.segment = std::move(segment);
  return intern(std::move(d));
}

const std::string& Token::text() const { return data_->text; }
const std::string& Token::key() const { return data_->skey; }

std::string trace_text(const Trace& t) {
  if (t.empty()) return "ε"; // epsilon
  std::string out;
  bool first = true;
  for (const auto& tok : t) {
    if (!first) out += "·";
    first = false;
    out += tok.text();
  }
  return out;
}

std::string trace_key(const Trace& t) {
  std::string out;
  for (const auto& tok : t) {
    out += tok.key();
    out += '\x1e';
  }
  return out;
}

bool trace_less(const Trace& a, const Trace& b) {
  return trace_text(a) < trace_text(b);
}

namespace {

void interleave_rec(const Trace& mu, std::size_t i, const Trace& nu,
                    std::size_t j, Trace& acc, std::vector<Trace>& out,
                    std::size_t cap) {
  if (out.size() > cap)
    throw SizeBudgetExceeded("interleaving exceeds " + std::to_string(cap) +
                             " traces");
  if (i == mu.size() && j == nu.size()) {
    out.push_back(acc);
    return;
  }
  if (i < mu.size()) {
    acc.push_back(mu[i]);
    interleave_rec(mu, i + 1, nu, j, acc, out, cap);
    acc.pop_back();
  }
  if (j < nu.size()) {
    acc.push_back(nu[j]);
    interleave_rec(mu, i, nu, j + 1, acc, out, cap);
    acc.pop_back();
  }
}

} // namespace

std::vector<Trace> interleave_vec(const Trace& mu, const Trace& nu,
                                  std::size_t cap) {
  std::vector<Trace> out;
  Trace acc;
  acc.reserve(mu.size() + nu.size());
  interleave_rec(mu, 0, nu, 0, acc, out, cap);
  // Duplicates collapse (equal tokens make distinct shuffles coincide).
  std::sort(out.begin(), out.end(), trace_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<Trace, bool (*)(const Trace&, const Trace&)>
interleave(const Trace& mu, const Trace& nu, std::size_t cap) {
  auto vec = interleave_vec(mu, nu, cap);
  std::set<Trace, bool (*)(const Trace&, const Trace&)> out(trace_less);
  out.insert(vec.begin(), vec.end());
  return out;
}

Trace unwrap(const Trace& sigma) {
  Trace out;
  out.reserve(sigma.size());
  for (const auto& t : sigma) {
    if (t.is_crit())
      out.insert(out.end(), t.segment().begin(), t.segment().end());
    else
      out.push_back(t);
  }
  return out;
}

Token wrap(const Trace& sigma) {
  for (const auto& t : sigma)
    if (t.is_crit())
      throw NestedCriticalError(
          "wrap applied to a trace that still holds a critical segment");
  return Token::of_crit(sigma);
}

std::set<Name> lifelines(const Token& t) {
  std::set<Name> out;
  switch (t.kind()) {
    case Token::Kind::Ev:
      out.insert(t.event().lifeline());
      break;
    case Token::Kind::Cond:
      break;
    case Token::Kind::Crit:
      for (const auto& s : t.segment()) {
        auto inner = lifelines(s);
        out.insert(inner.begin(), inner.end());
      }
      break;
  }
  return out;
}

TaggedTrace tag(const Trace& sigma, const Label& l) {
  TaggedTrace out;
  out.reserve(sigma.size());
  for (const auto& t : sigma) out.push_back({t, l});
  return out;
}

Trace untag(const TaggedTrace& tt) {
  Trace out;
  out.reserve(tt.size());
  for (const auto& t : tt) out.push_back(t.token);
  return out;
}

bool shares_lifelines(const TaggedToken& t1, const TaggedToken& t2) {
  auto l1 = lifelines(t1.token);
  if (l1.empty()) return false;
  auto l2 = lifelines(t2.token);
  for (const auto& n : l1)
    if (l2.count(n)) return true;
  return false;
}

std::vector<Trace> unwrap_steps(const Trace& sigma) {
  std::vector<Trace> out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!sigma[i].is_crit()) continue;
    Trace step;
    step.reserve(sigma.size() + sigma[i].segment().size());
    step.insert(step.end(), sigma.begin(), sigma.begin() + i);
    step.insert(step.end(), sigma[i].segment().begin(),
                sigma[i].segment().end());
    step.insert(step.end(), sigma.begin() + i + 1, sigma.end());
    out.push_back(std::move(step));
  }
  return out;
}

} // namespace sdconform
