#ifndef SDCONFORM_TRACES_HPP
#define SDCONFORM_TRACES_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "sdconform/cond.hpp"
#include "sdconform/model.hpp"

namespace sdconform {

class Token;
using Trace = std::vector<Token>;

/// A trace token: an event, a guard condition, or a critical segment
/// protecting a flat sub-trace (segments never nest). Tokens are immutable
/// flyweights; copies share one payload, and equal event/condition tokens
/// built through the factories share storage.
class Token {
public:
  enum class Kind { Ev, Cond, Crit };

  static Token of_event(Event e);
  static Token of_cond(CondPtr c);
  static Token of_crit(Trace segment); // throws NestedCritical

  Kind kind() const { return data_->kind; }
  bool is_event() const { return kind() == Kind::Ev; }
  bool is_cond() const { return kind() == Kind::Cond; }
  bool is_crit() const { return kind() == Kind::Crit; }

  const Event& event() const { return data_->event; }
  const CondPtr& cond() const { return data_->cond; }
  const Trace& segment() const { return data_->segment; }

  bool operator==(const Token& o) const {
    return data_ == o.data_ || key() == o.key();
  }
  bool operator!=(const Token& o) const { return !(*this == o); }
  bool operator<(const Token& o) const { return text() < o.text(); }

  /// Display form: !msg(S,R), [cond], or << ... >>.
  const std::string& text() const;
  /// Injective structural serialization; fixes internal set ordering.
  const std::string& key() const;

private:
  struct Data {
    Kind kind = Kind::Ev;
    Event event;
    CondPtr cond;
    Trace segment;
    std::string text;
    std::string skey;
  };
  explicit Token(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  static Token intern(Data data);

  std::shared_ptr<const Data> data_;
};

std::string trace_text(const Trace& t);
std::string trace_key(const Trace& t);
bool trace_less(const Trace& a, const Trace& b);

struct TaggedToken {
  Token token;
  Label tag;
};
using TaggedTrace = std::vector<TaggedToken>;

/// All shuffles of mu and nu at token granularity; critical segments move as
/// single units. Throws SizeBudgetExceeded when the result would exceed cap.
std::set<Trace, bool (*)(const Trace&, const Trace&)>
interleave(const Trace& mu, const Trace& nu, std::size_t cap);

std::vector<Trace> interleave_vec(const Trace& mu, const Trace& nu,
                                  std::size_t cap);

/// The unique normal form with every critical segment flattened in place.
Trace unwrap(const Trace& sigma);

/// Wraps a segment-free trace into one critical-segment token.
/// Throws NestedCritical if sigma contains a segment.
Token wrap(const Trace& sigma);

/// Lifelines associated with a token: sender of a send, receiver of a
/// receive, the union over a segment, nothing for a condition.
std::set<Name> lifelines(const Token& t);

TaggedTrace tag(const Trace& sigma, const Label& l);
Trace untag(const TaggedTrace& tt);

/// The ~ relation: tagged tokens sharing at least one lifeline.
bool shares_lifelines(const TaggedToken& t1, const TaggedToken& t2);

/// One-step unwrap results (each flattens exactly one segment); used by the
/// rewriting-order tests and the simulation helper.
std::vector<Trace> unwrap_steps(const Trace& sigma);

} // namespace sdconform

#endif
