#include "sdconform/model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "sdconform/errors.hpp"

namespace sdconform {

bool is_valid_name(const std::string& text) {
  if (text.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(text[0])) && text[0] != '_')
    return false;
  for (char ch : text)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return true;
}

Literal other_literal() { return Literal{"other", Literal::Kind::Symbol}; }

Literal make_literal(const std::string& text) {
  if (text == "true" || text == "false")
    return Literal{text, Literal::Kind::Boolean};
  if (!text.empty() &&
      std::all_of(text.begin(), text.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    // Canonical numeric text: no leading zeros.
    long v = std::stol(text);
    return Literal{std::to_string(v), Literal::Kind::Number};
  }
  return Literal{text, Literal::Kind::Symbol};
}

bool Event::operator<(const Event& o) const {
  if (message != o.message) return message < o.message;
  if (kind != o.kind) return kind < o.kind;
  if (sender != o.sender) return sender < o.sender;
  if (receiver != o.receiver) return receiver < o.receiver;
  return params < o.params;
}

std::string Event::text() const {
  std::ostringstream out;
  out << (kind == Kind::Send ? '!' : '?') << message << '(' << sender << ','
      << receiver;
  for (const auto& p : params) out << ',' << p;
  out << ')';
  return out.str();
}

Event send_event(Name message, Name sender, Name receiver,
                 std::vector<Name> params) {
  return Event{Event::Kind::Send, std::move(message), std::move(sender),
               std::move(receiver), std::move(params)};
}

Event recv_event(Name message, Name sender, Name receiver,
                 std::vector<Name> params) {
  return Event{Event::Kind::Receive, std::move(message), std::move(sender),
               std::move(receiver), std::move(params)};
}

// ---------------------------------------------------------------------------
// Conditions

CondPtr true_cond() {
  static const CondPtr t = std::make_shared<Cond>(Cond{Cond::Kind::True});
  return t;
}

CondPtr false_cond() {
  static const CondPtr f = std::make_shared<Cond>(Cond{Cond::Kind::False});
  return f;
}

CondPtr atom(Term lhs, Rel rel, Term rhs) {
  auto c = std::make_shared<Cond>();
  c->kind = Cond::Kind::Atom;
  c->lhs = std::move(lhs);
  c->rel = rel;
  c->rhs = std::move(rhs);
  return c;
}

CondPtr atom(const Name& lhs, Rel rel, Term rhs) {
  return atom(Term::name(lhs), rel, std::move(rhs));
}

bool cond_equal(const CondPtr& c1, const CondPtr& c2) {
  if (c1 == c2) return true;
  if (!c1 || !c2) return false;
  if (c1->kind != c2->kind) return false;
  switch (c1->kind) {
    case Cond::Kind::True:
    case Cond::Kind::False:
      return true;
    case Cond::Kind::Atom:
      return c1->lhs == c2->lhs && c1->rel == c2->rel && c1->rhs == c2->rhs;
    case Cond::Kind::Not:
      return cond_equal(c1->a, c2->a);
    case Cond::Kind::And:
    case Cond::Kind::Or:
      return cond_equal(c1->a, c2->a) && cond_equal(c1->b, c2->b);
  }
  return false;
}

namespace {

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
  }
  return "?";
}

int cond_prec(const Cond& c) {
  switch (c.kind) {
    case Cond::Kind::Or: return 1;
    case Cond::Kind::And: return 2;
    default: return 3;
  }
}

void cond_text_rec(const CondPtr& c, int parent_prec, std::ostream& out) {
  int prec = cond_prec(*c);
  bool parens = prec < parent_prec;
  if (parens) out << '(';
  switch (c->kind) {
    case Cond::Kind::True: out << "true"; break;
    case Cond::Kind::False: out << "false"; break;
    case Cond::Kind::Atom:
      out << c->lhs.text << ' ' << rel_text(c->rel) << ' ' << c->rhs.text;
      break;
    case Cond::Kind::Not:
      out << '!';
      if (c->a->kind == Cond::Kind::True || c->a->kind == Cond::Kind::False) {
        cond_text_rec(c->a, 4, out);
      } else {
        out << '(';
        cond_text_rec(c->a, 0, out);
        out << ')';
      }
      break;
    case Cond::Kind::And:
      cond_text_rec(c->a, 2, out);
      out << " && ";
      cond_text_rec(c->b, 3, out);
      break;
    case Cond::Kind::Or:
      cond_text_rec(c->a, 1, out);
      out << " || ";
      cond_text_rec(c->b, 2, out);
      break;
  }
  if (parens) out << ')';
}

} // namespace

std::string cond_text(const CondPtr& c) {
  std::ostringstream out;
  cond_text_rec(c, 0, out);
  return out.str();
}

std::string term_key(const Term& t) {
  std::ostringstream out;
  out << (t.is_literal ? 'L' : 'N');
  if (t.is_literal) out << static_cast<int>(t.lit_kind);
  out << t.text;
  return out.str();
}

namespace {

void cond_key_rec(const CondPtr& c, std::ostream& out) {
  switch (c->kind) {
    case Cond::Kind::True: out << 'T'; return;
    case Cond::Kind::False: out << 'F'; return;
    case Cond::Kind::Atom:
      out << "A(" << term_key(c->lhs) << ' ' << static_cast<int>(c->rel) << ' '
          << term_key(c->rhs) << ')';
      return;
    case Cond::Kind::Not:
      out << "!(";
      cond_key_rec(c->a, out);
      out << ')';
      return;
    case Cond::Kind::And:
    case Cond::Kind::Or:
      out << (c->kind == Cond::Kind::And ? "&(" : "|(");
      cond_key_rec(c->a, out);
      out << ',';
      cond_key_rec(c->b, out);
      out << ')';
      return;
  }
}

} // namespace

std::string cond_key(const CondPtr& c) {
  std::ostringstream out;
  cond_key_rec(c, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Diagrams

std::string SourceSpan::text() const {
  if (!known()) return "";
  std::ostringstream out;
  out << file << ':' << start_line << ':' << start_col;
  return out.str();
}

namespace {
DiagramPtr node(Diagram d) { return std::make_shared<Diagram>(std::move(d)); }
} // namespace

DiagramPtr tau() {
  static const DiagramPtr t = node(Diagram{});
  return t;
}

DiagramPtr ev(Event e) {
  Diagram d;
  d.kind = Diagram::Kind::Ev;
  d.event = std::move(e);
  return node(std::move(d));
}

DiagramPtr opt(CondPtr c, DiagramPtr d1) {
  Diagram d;
  d.kind = Diagram::Kind::Opt;
  d.guard = std::move(c);
  d.d1 = std::move(d1);
  return node(std::move(d));
}

DiagramPtr alt(CondPtr c, DiagramPtr d1, DiagramPtr d2) {
  Diagram d;
  d.kind = Diagram::Kind::Alt;
  d.guard = std::move(c);
  d.d1 = std::move(d1);
  d.d2 = std::move(d2);
  return node(std::move(d));
}

DiagramPtr loop(CondPtr c, DiagramPtr d1) {
  Diagram d;
  d.kind = Diagram::Kind::Loop;
  d.guard = std::move(c);
  d.d1 = std::move(d1);
  return node(std::move(d));
}

DiagramPtr critical(DiagramPtr d1) {
  Diagram d;
  d.kind = Diagram::Kind::Critical;
  d.d1 = std::move(d1);
  return node(std::move(d));
}

namespace {
DiagramPtr binary(Diagram::Kind k, DiagramPtr d1, DiagramPtr d2) {
  Diagram d;
  d.kind = k;
  d.d1 = std::move(d1);
  d.d2 = std::move(d2);
  return node(std::move(d));
}
} // namespace

DiagramPtr par(DiagramPtr d1, DiagramPtr d2) {
  return binary(Diagram::Kind::Par, std::move(d1), std::move(d2));
}
DiagramPtr strict(DiagramPtr d1, DiagramPtr d2) {
  return binary(Diagram::Kind::Strict, std::move(d1), std::move(d2));
}
DiagramPtr seq(DiagramPtr d1, DiagramPtr d2) {
  return binary(Diagram::Kind::Seq, std::move(d1), std::move(d2));
}

std::set<LabelEdge> transitive_closure(const std::set<LabelEdge>& order) {
  std::set<Label> labels;
  for (const auto& [a, b] : order) {
    labels.insert(a);
    labels.insert(b);
  }
  std::set<LabelEdge> closure = order;
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<LabelEdge> add;
    for (const auto& [a, b] : closure)
      for (const auto& [c, d] : closure)
        if (b == c && !closure.count({a, d})) add.insert({a, d});
    if (!add.empty()) {
      closure.insert(add.begin(), add.end());
      changed = true;
    }
  }
  return closure;
}

std::set<LabelEdge> transitive_reduction(const std::set<Label>& labels,
                                         const std::set<LabelEdge>& order) {
  (void)labels;
  auto closure = transitive_closure(order);
  std::set<LabelEdge> reduced;
  for (const auto& [a, b] : order) {
    bool implied = false;
    for (const auto& [c, d] : closure) {
      if (c == a && d != b && closure.count({d, b})) {
        implied = true;
        break;
      }
    }
    if (!implied) reduced.insert({a, b});
  }
  return reduced;
}

namespace {

bool order_acyclic(const std::set<LabelEdge>& order) {
  auto closure = transitive_closure(order);
  for (const auto& [a, b] : closure)
    if (a == b) return false;
  return true;
}

} // namespace

DiagramPtr make_block(std::map<Label, DiagramPtr> body,
                      std::set<LabelEdge> order) {
  Diagram d;
  d.kind = Diagram::Kind::Block;
  for (const auto& [l, sub] : body) d.labels.push_back(l);
  bool reflexive = false;
  for (const auto& [a, b] : order)
    if (a == b) reflexive = true;
  if (!reflexive && order_acyclic(order)) {
    std::set<Label> labelset(d.labels.begin(), d.labels.end());
    d.order = transitive_reduction(labelset, order);
  } else {
    d.order = std::move(order); // left for validate to report
  }
  d.body = std::move(body);
  return node(std::move(d));
}

namespace {

void validate_rec(const DiagramPtr& d, std::vector<Violation>& out) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
    case Diagram::Kind::Ev:
      return;
    case Diagram::Kind::Opt:
    case Diagram::Kind::Loop:
    case Diagram::Kind::Critical:
      validate_rec(d->d1, out);
      return;
    case Diagram::Kind::Alt:
    case Diagram::Kind::Par:
    case Diagram::Kind::Strict:
    case Diagram::Kind::Seq:
      validate_rec(d->d1, out);
      if (d->d2) validate_rec(d->d2, out);
      return;
    case Diagram::Kind::Block:
      break;
  }
  if (d->labels.empty())
    out.push_back({"block has no labels", d->span});
  std::set<Label> labelset(d->labels.begin(), d->labels.end());
  for (const auto& l : d->labels) {
    if (!d->body.count(l))
      out.push_back({"block label '" + l.str() + "' has no body", d->span});
  }
  for (const auto& [a, b] : d->order) {
    if (!labelset.count(a) || !labelset.count(b))
      out.push_back({"order edge '" + a.str() + " -> " + b.str() +
                         "' leaves the block's label set",
                     d->span});
    if (a == b)
      out.push_back({"order edge '" + a.str() + " -> " + b.str() +
                         "' is reflexive",
                     d->span});
  }
  auto closure = transitive_closure(d->order);
  for (const auto& [a, b] : closure) {
    if (a == b && d->order.count({a, b}) == 0) {
      out.push_back({"block order has a cycle through '" + a.str() + "'",
                     d->span});
      break;
    }
  }
  for (const auto& [l, sub] : d->body) validate_rec(sub, out);
}

} // namespace

std::vector<Violation> validate(const DiagramPtr& d) {
  std::vector<Violation> out;
  validate_rec(d, out);
  return out;
}

namespace {

void events_rec(const DiagramPtr& d, std::set<Event>& out) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
      return;
    case Diagram::Kind::Ev:
      out.insert(d->event);
      return;
    case Diagram::Kind::Block:
      for (const auto& [l, sub] : d->body) events_rec(sub, out);
      return;
    default:
      if (d->d1) events_rec(d->d1, out);
      if (d->d2) events_rec(d->d2, out);
      return;
  }
}

} // namespace

std::set<Event> events_of(const DiagramPtr& d) {
  std::set<Event> out;
  events_rec(d, out);
  return out;
}

std::set<Name> lifelines_of(const DiagramPtr& d) {
  std::set<Name> out;
  for (const auto& e : events_of(d)) {
    out.insert(e.sender);
    out.insert(e.receiver);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality with block label alpha-equivalence

namespace {

bool equal_block(const Diagram& b1, const Diagram& b2);

bool equal_rec(const DiagramPtr& d1, const DiagramPtr& d2) {
  if (d1 == d2) return true;
  if (d1->kind != d2->kind) return false;
  switch (d1->kind) {
    case Diagram::Kind::Tau:
      return true;
    case Diagram::Kind::Ev:
      return d1->event == d2->event;
    case Diagram::Kind::Opt:
    case Diagram::Kind::Loop:
      return cond_equal(d1->guard, d2->guard) && equal_rec(d1->d1, d2->d1);
    case Diagram::Kind::Alt:
      return cond_equal(d1->guard, d2->guard) && equal_rec(d1->d1, d2->d1) &&
             equal_rec(d1->d2, d2->d2);
    case Diagram::Kind::Critical:
      return equal_rec(d1->d1, d2->d1);
    case Diagram::Kind::Par:
    case Diagram::Kind::Strict:
    case Diagram::Kind::Seq:
      return equal_rec(d1->d1, d2->d1) && equal_rec(d1->d2, d2->d2);
    case Diagram::Kind::Block:
      return equal_block(*d1, *d2);
  }
  return false;
}

// Backtracking label matching: bodies must be pairwise equal and the order
// relations must correspond under the bijection.
bool match_labels(const Diagram& b1, const Diagram& b2, std::size_t i,
                  std::map<Label, Label>& fwd, std::set<Label>& used) {
  if (i == b1.labels.size()) {
    std::set<LabelEdge> mapped;
    for (const auto& [a, b] : b1.order) mapped.insert({fwd.at(a), fwd.at(b)});
    return mapped == b2.order;
  }
  const Label& l1 = b1.labels[i];
  for (const auto& l2 : b2.labels) {
    if (used.count(l2)) continue;
    if (!equal_rec(b1.body.at(l1), b2.body.at(l2))) continue;
    fwd[l1] = l2;
    used.insert(l2);
    if (match_labels(b1, b2, i + 1, fwd, used)) return true;
    fwd.erase(l1);
    used.erase(l2);
  }
  return false;
}

bool equal_block(const Diagram& b1, const Diagram& b2) {
  if (b1.labels.size() != b2.labels.size()) return false;
  if (b1.order.size() != b2.order.size()) return false;
  std::map<Label, Label> fwd;
  std::set<Label> used;
  return match_labels(b1, b2, 0, fwd, used);
}

} // namespace

bool equal_sd(const DiagramPtr& d1, const DiagramPtr& d2) {
  return equal_rec(d1, d2);
}

// ---------------------------------------------------------------------------
// Canonical key

namespace {

void key_rec(const DiagramPtr& d, std::ostream& out) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
      out << "tau";
      return;
    case Diagram::Kind::Ev:
      out << d->event.text();
      return;
    case Diagram::Kind::Opt:
      out << "opt(" << cond_text(d->guard) << ',';
      key_rec(d->d1, out);
      out << ')';
      return;
    case Diagram::Kind::Alt:
      out << "alt(" << cond_text(d->guard) << ',';
      key_rec(d->d1, out);
      out << ',';
      key_rec(d->d2, out);
      out << ')';
      return;
    case Diagram::Kind::Loop:
      out << "loop(" << cond_text(d->guard) << ',';
      key_rec(d->d1, out);
      out << ')';
      return;
    case Diagram::Kind::Critical:
      out << "critical(";
      key_rec(d->d1, out);
      out << ')';
      return;
    case Diagram::Kind::Par:
    case Diagram::Kind::Strict:
    case Diagram::Kind::Seq: {
      const char* name = d->kind == Diagram::Kind::Par      ? "par"
                         : d->kind == Diagram::Kind::Strict ? "strict"
                                                            : "seq";
      out << name << '(';
      key_rec(d->d1, out);
      out << ',';
      key_rec(d->d2, out);
      out << ')';
      return;
    }
    case Diagram::Kind::Block: {
      out << "block(";
      bool first = true;
      for (const auto& l : d->labels) {
        if (!first) out << ';';
        first = false;
        out << l.str() << ':';
        key_rec(d->body.at(l), out);
      }
      out << '|';
      first = true;
      for (const auto& [a, b] : d->order) {
        if (!first) out << ';';
        first = false;
        out << a.str() << ">" << b.str();
      }
      out << ')';
      return;
    }
  }
}

} // namespace

std::string diagram_key(const DiagramPtr& d) {
  std::ostringstream out;
  key_rec(d, out);
  return out.str();
}

} // namespace sdconform
