#ifndef SDCONFORM_MODEL_HPP
#define SDCONFORM_MODEL_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sdconform {

/// Identifier used for lifelines, messages, parameters and condition
/// variables. Must match [A-Za-z_][A-Za-z0-9_]*; case-sensitive.
using Name = std::string;

bool is_valid_name(const std::string& text);

struct Literal {
  enum class Kind { Boolean, Number, Symbol };
  std::string text;
  Kind kind = Kind::Symbol;

  bool operator==(const Literal& o) const {
    return text == o.text && kind == o.kind;
  }
  bool operator<(const Literal& o) const {
    return text != o.text ? text < o.text : kind < o.kind;
  }
};

/// The distinguished constant standing for "some value distinct from every
/// literal" (used when a witness only needs a guard variable to avoid all
/// named values, e.g. a non-null pointer).
Literal other_literal();

/// Builds a literal from its token text: true/false are booleans, an all
/// digit token is a number, anything else (null, other, ...) a symbol.
Literal make_literal(const std::string& text);

/// One side of a relational atom or the target of a substitution:
/// either a Name or a Literal.
struct Term {
  bool is_literal = false;
  std::string text;
  Literal::Kind lit_kind = Literal::Kind::Symbol;

  static Term name(Name n) { return Term{false, std::move(n), Literal::Kind::Symbol}; }
  static Term literal(const Literal& l) { return Term{true, l.text, l.kind}; }

  Literal as_literal() const { return Literal{text, lit_kind}; }

  bool operator==(const Term& o) const {
    return is_literal == o.is_literal && text == o.text &&
           (!is_literal || lit_kind == o.lit_kind);
  }
  bool operator<(const Term& o) const {
    if (is_literal != o.is_literal) return is_literal < o.is_literal;
    if (text != o.text) return text < o.text;
    return lit_kind < o.lit_kind;
  }
};

struct Event {
  enum class Kind { Send, Receive };
  Kind kind = Kind::Send;
  Name message;
  Name sender;
  Name receiver;
  std::vector<Name> params; // ordered; equality uses the ordered list

  bool operator==(const Event& o) const {
    return kind == o.kind && message == o.message && sender == o.sender &&
           receiver == o.receiver && params == o.params;
  }
  bool operator!=(const Event& o) const { return !(*this == o); }
  bool operator<(const Event& o) const;

  /// The lifeline owning the event: sender of a send, receiver of a receive.
  const Name& lifeline() const {
    return kind == Kind::Send ? sender : receiver;
  }

  std::string text() const; // canonical form, e.g. !msg(S,R) or ?msg(S,R,p)
};

Event send_event(Name message, Name sender, Name receiver,
                 std::vector<Name> params = {});
Event recv_event(Name message, Name sender, Name receiver,
                 std::vector<Name> params = {});

// ---------------------------------------------------------------------------
// Guard conditions

enum class Rel { Eq, Ne, Le, Lt };

struct Cond;
using CondPtr = std::shared_ptr<const Cond>;

struct Cond {
  enum class Kind { True, False, Atom, Not, And, Or };
  Kind kind = Kind::True;
  // Atom payload. The parser only admits a Name on the left; substitution
  // may turn either side into a literal.
  Term lhs;
  Rel rel = Rel::Eq;
  Term rhs;
  // Not uses a; And/Or use a and b.
  CondPtr a;
  CondPtr b;
};

CondPtr true_cond();
CondPtr false_cond();
CondPtr atom(Term lhs, Rel rel, Term rhs);
CondPtr atom(const Name& lhs, Rel rel, Term rhs);

bool cond_equal(const CondPtr& c1, const CondPtr& c2);
std::string cond_text(const CondPtr& c);

/// Injective structural serializations; fix the internal ordering of sets
/// (display text is re-sorted separately at report boundaries).
std::string term_key(const Term& t);
std::string cond_key(const CondPtr& c);

// ---------------------------------------------------------------------------
// Sequence diagrams

/// Block labels; either a plain identifier or a number. Bound names: two
/// blocks that differ only by a label renaming are considered equal.
struct Label {
  bool numeric = false;
  long number = 0;
  std::string text;

  static Label of_number(long n) { return Label{true, n, std::to_string(n)}; }
  static Label of_text(std::string t) { return Label{false, 0, std::move(t)}; }

  bool operator==(const Label& o) const {
    return numeric == o.numeric && (numeric ? number == o.number : text == o.text);
  }
  bool operator!=(const Label& o) const { return !(*this == o); }
  // Canonical order: numbers first (by value), then identifiers.
  bool operator<(const Label& o) const {
    if (numeric != o.numeric) return numeric;
    return numeric ? number < o.number : text < o.text;
  }
  const std::string& str() const { return text; }
};

struct SourceSpan {
  std::string file;
  int start_line = 0, start_col = 0;
  int end_line = 0, end_col = 0;
  bool known() const { return start_line > 0; }
  std::string text() const;
};

struct Diagram;
using DiagramPtr = std::shared_ptr<const Diagram>;

using LabelEdge = std::pair<Label, Label>;

struct Diagram {
  enum class Kind { Tau, Ev, Opt, Alt, Loop, Critical, Par, Strict, Seq, Block };
  Kind kind = Kind::Tau;

  Event event;       // Ev
  CondPtr guard;     // Opt, Alt, Loop
  DiagramPtr d1;     // first operand
  DiagramPtr d2;     // second operand (Alt, Par, Strict, Seq)

  // Block payload. labels is kept sorted; order holds the transitive
  // reduction whenever the ingested relation was acyclic (see make_block).
  std::vector<Label> labels;
  std::map<Label, DiagramPtr> body;
  std::set<LabelEdge> order;

  SourceSpan span;
};

DiagramPtr tau();
DiagramPtr ev(Event e);
DiagramPtr opt(CondPtr c, DiagramPtr d);
DiagramPtr alt(CondPtr c, DiagramPtr d1, DiagramPtr d2);
DiagramPtr loop(CondPtr c, DiagramPtr d);
DiagramPtr critical(DiagramPtr d);
DiagramPtr par(DiagramPtr d1, DiagramPtr d2);
DiagramPtr strict(DiagramPtr d1, DiagramPtr d2);
DiagramPtr seq(DiagramPtr d1, DiagramPtr d2);

/// Builds a block over the given bodies. Any acyclic order relation is
/// accepted and replaced by its transitive reduction; a cyclic or otherwise
/// ill-formed relation is stored as given so that validate can report it.
DiagramPtr make_block(std::map<Label, DiagramPtr> body, std::set<LabelEdge> order);

struct Violation {
  std::string message;
  SourceSpan span;
};

/// Structural checks: block labels non-empty, order edges within the label
/// set, irreflexive and acyclic. Violations are data, not failures.
std::vector<Violation> validate(const DiagramPtr& d);

/// All observable events occurring in d.
std::set<Event> events_of(const DiagramPtr& d);

/// All lifeline names occurring in events of d.
std::set<Name> lifelines_of(const DiagramPtr& d);

/// Structural equality; blocks compare up to label renaming.
bool equal_sd(const DiagramPtr& d1, const DiagramPtr& d2);

/// Transitive reduction of an acyclic relation (helper; exposed for tests).
std::set<LabelEdge> transitive_reduction(const std::set<Label>& labels,
                                         const std::set<LabelEdge>& order);

/// Strict transitive closure.
std::set<LabelEdge> transitive_closure(const std::set<LabelEdge>& order);

/// Deterministic canonical text of a diagram (used for memo keys and
/// diffable debug output; blocks are printed with labels in canonical order).
std::string diagram_key(const DiagramPtr& d);

} // namespace sdconform

#endif
