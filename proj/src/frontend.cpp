#include "sdconform/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdconform/errors.hpp"

namespace sdconform {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident, Number, LBrace, RBrace, LParen, RParen, Comma, Semi, Colon,
  Arrow, Eq, Ne, Le, Lt, AndAnd, OrOr, Bang, End
};

struct Lexeme {
  Tok tok;
  std::string text;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  const std::string& file;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Lexeme> all;

  [[noreturn]] void fail(const std::string& msg, int l, int c) const {
    std::ostringstream out;
    out << file << ':' << l << ':' << c << ": " << msg;
    throw ParseError(out.str());
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
        continue;
      }
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
        continue;
      }
      int l = line, co = col;
      auto push = [&](Tok t, std::string text, std::size_t len) {
        all.push_back({t, std::move(text), l, co});
        advance(len);
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t end = pos;
        while (end < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[end])) ||
                src[end] == '_'))
          ++end;
        push(Tok::Ident, src.substr(pos, end - pos), end - pos);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t end = pos;
        while (end < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[end])))
          ++end;
        push(Tok::Number, src.substr(pos, end - pos), end - pos);
        continue;
      }
      auto two = pos + 1 < src.size() ? src.substr(pos, 2) : std::string();
      if (two == "->") { push(Tok::Arrow, two, 2); continue; }
      if (two == "!=") { push(Tok::Ne, two, 2); continue; }
      if (two == "<=") { push(Tok::Le, two, 2); continue; }
      if (two == "&&") { push(Tok::AndAnd, two, 2); continue; }
      if (two == "||") { push(Tok::OrOr, two, 2); continue; }
      switch (c) {
        case '{': push(Tok::LBrace, "{", 1); continue;
        case '}': push(Tok::RBrace, "}", 1); continue;
        case '(': push(Tok::LParen, "(", 1); continue;
        case ')': push(Tok::RParen, ")", 1); continue;
        case ',': push(Tok::Comma, ",", 1); continue;
        case ';': push(Tok::Semi, ";", 1); continue;
        case ':': push(Tok::Colon, ":", 1); continue;
        case '=': push(Tok::Eq, "=", 1); continue;
        case '<': push(Tok::Lt, "<", 1); continue;
        case '!': push(Tok::Bang, "!", 1); continue;
        default:
          fail(std::string("unexpected character '") + c + "'", l, co);
      }
    }
    all.push_back({Tok::End, "", line, col});
  }
};

const std::set<std::string> kUnsupported = {"neg",    "assert",   "break",
                                            "ignore", "consider", "ref"};
const std::set<std::string> kLiteralWords = {"true", "false", "null", "other"};

// ---------------------------------------------------------------------------
// Parser

struct Parser {
  const std::string& file;
  std::vector<Lexeme> toks;
  std::size_t pos = 0;

  const Lexeme& peek() const { return toks[pos]; }
  const Lexeme& get() { return toks[pos++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::ostringstream out;
    out << file << ':' << t.line << ':' << t.col << ": " << msg;
    if (t.tok == Tok::End)
      out << " (at end of input)";
    else
      out << " (at '" << t.text << "')";
    throw ParseError(out.str());
  }

  void expect(Tok t, const char* what) {
    if (peek().tok != t) fail(std::string("expected ") + what);
    ++pos;
  }

  bool accept(Tok t) {
    if (peek().tok != t) return false;
    ++pos;
    return true;
  }

  bool at_keyword(const char* kw) const {
    return peek().tok == Tok::Ident && peek().text == kw;
  }

  std::string expect_name(const char* what) {
    if (peek().tok != Tok::Ident) fail(std::string("expected ") + what);
    return get().text;
  }

  SourceSpan span_here() const {
    SourceSpan s;
    s.file = file;
    s.start_line = peek().line;
    s.start_col = peek().col;
    s.end_line = peek().line;
    s.end_col = peek().col;
    return s;
  }

  DiagramPtr with_span(DiagramPtr d, const SourceSpan& s) {
    const_cast<Diagram*>(d.get())->span = s;
    return d;
  }

  // cond := or ; or := and {'||' and} ; and := unary {'&&' unary}
  // unary := '!' unary | 'true' | 'false' | '(' cond ')' | atom
  CondPtr parse_cond() {
    CondPtr c = parse_and();
    while (accept(Tok::OrOr)) c = disj(c, parse_and());
    return c;
  }

  CondPtr parse_and() {
    CondPtr c = parse_unary();
    while (accept(Tok::AndAnd)) c = conj(c, parse_unary());
    return c;
  }

  Term parse_term() {
    if (peek().tok == Tok::Number) return Term::literal(make_literal(get().text));
    std::string word = expect_name("name or literal");
    if (kLiteralWords.count(word)) return Term::literal(make_literal(word));
    return Term::name(word);
  }

  CondPtr parse_unary() {
    if (accept(Tok::Bang)) return negate(parse_unary());
    if (accept(Tok::LParen)) {
      CondPtr c = parse_cond();
      expect(Tok::RParen, "')'");
      return c;
    }
    if (at_keyword("true")) {
      get();
      return true_cond();
    }
    if (at_keyword("false")) {
      get();
      return false_cond();
    }
    std::string lhs = expect_name("condition atom");
    Rel rel;
    switch (peek().tok) {
      case Tok::Eq: rel = Rel::Eq; break;
      case Tok::Ne: rel = Rel::Ne; break;
      case Tok::Le: rel = Rel::Le; break;
      case Tok::Lt: rel = Rel::Lt; break;
      default: fail("expected one of '=', '!=', '<=', '<'");
    }
    get();
    return atom(Term::name(lhs), rel, parse_term());
  }

  std::vector<Name> parse_params() {
    expect(Tok::LParen, "'('");
    std::vector<Name> params;
    if (peek().tok != Tok::RParen) {
      params.push_back(expect_name("parameter name"));
      while (accept(Tok::Comma)) params.push_back(expect_name("parameter name"));
    }
    expect(Tok::RParen, "')'");
    return params;
  }

  Event parse_event_tail(Event::Kind kind) {
    std::string message = expect_name("message name");
    auto params = parse_params();
    if (!at_keyword("from")) fail("expected 'from'");
    get();
    std::string sender = expect_name("sender lifeline");
    if (!at_keyword("to")) fail("expected 'to'");
    get();
    std::string receiver = expect_name("receiver lifeline");
    return Event{kind, message, sender, receiver, params};
  }

  Label parse_label() {
    if (peek().tok == Tok::Number) return Label::of_number(std::stol(get().text));
    return Label::of_text(expect_name("label"));
  }

  DiagramPtr parse_braced_frag() {
    expect(Tok::LBrace, "'{'");
    DiagramPtr d = parse_frag();
    expect(Tok::RBrace, "'}'");
    return d;
  }

  DiagramPtr parse_frag() {
    SourceSpan s = span_here();
    if (peek().tok != Tok::Ident) fail("expected a fragment");
    std::string kw = peek().text;
    if (kUnsupported.count(kw))
      throw UnsupportedOperatorError(file + ':' + std::to_string(peek().line) +
                                     ':' + std::to_string(peek().col) +
                                     ": interaction operator '" + kw +
                                     "' is not supported");
    if (kw == "tau") {
      get();
      return with_span(tau(), s);
    }
    if (kw == "send" || kw == "recv") {
      get();
      return with_span(ev(parse_event_tail(kw == "send" ? Event::Kind::Send
                                                        : Event::Kind::Receive)),
                       s);
    }
    if (kw == "msg") {
      get();
      Event snd = parse_event_tail(Event::Kind::Send);
      Event rcv = snd;
      rcv.kind = Event::Kind::Receive;
      return with_span(strict(ev(snd), ev(rcv)), s);
    }
    if (kw == "opt" || kw == "alt" || kw == "loop") {
      get();
      expect(Tok::LParen, "'('");
      CondPtr c = parse_cond();
      expect(Tok::RParen, "')'");
      DiagramPtr d1 = parse_braced_frag();
      if (kw == "opt") return with_span(opt(c, d1), s);
      if (kw == "loop") return with_span(loop(c, d1), s);
      if (!at_keyword("else")) fail("expected 'else'");
      get();
      DiagramPtr d2 = parse_braced_frag();
      return with_span(alt(c, d1, d2), s);
    }
    if (kw == "critical") {
      get();
      return with_span(critical(parse_braced_frag()), s);
    }
    if (kw == "par" || kw == "strict" || kw == "seq") {
      get();
      DiagramPtr d1 = parse_braced_frag();
      if (!at_keyword("and")) fail("expected 'and'");
      get();
      DiagramPtr d2 = parse_braced_frag();
      if (kw == "par") return with_span(par(d1, d2), s);
      if (kw == "strict") return with_span(strict(d1, d2), s);
      return with_span(seq(d1, d2), s);
    }
    if (kw == "block") {
      get();
      expect(Tok::LBrace, "'{'");
      std::map<Label, DiagramPtr> body;
      while (peek().tok != Tok::RBrace && !at_keyword("order")) {
        Label l = parse_label();
        expect(Tok::Colon, "':'");
        DiagramPtr sub = parse_frag();
        expect(Tok::Semi, "';'");
        if (body.count(l)) fail("duplicate block label '" + l.str() + "'");
        body.emplace(l, sub);
      }
      std::set<LabelEdge> order;
      while (at_keyword("order")) {
        get();
        while (peek().tok != Tok::RBrace && !at_keyword("order")) {
          Label a = parse_label();
          expect(Tok::Arrow, "'->'");
          Label b = parse_label();
          expect(Tok::Semi, "';'");
          order.insert({a, b});
        }
      }
      expect(Tok::RBrace, "'}'");
      return with_span(make_block(std::move(body), std::move(order)), s);
    }
    fail("unknown fragment keyword '" + kw + "'");
  }

  ParsedDiagram parse_diagram() {
    if (!at_keyword("sd")) fail("expected 'sd'");
    get();
    std::string name = expect_name("diagram name");
    DiagramPtr root = parse_braced_frag();
    expect(Tok::End, "end of input");
    return ParsedDiagram{name, root};
  }
};

void check_valid(const ParsedDiagram& d, const std::string& filename) {
  auto violations = validate(d.root);
  if (violations.empty()) return;
  std::ostringstream out;
  out << filename << ": diagram '" << d.name << "' is not well formed:";
  for (const auto& v : violations) {
    out << "\n  - " << v.message;
    if (v.span.known()) out << " (" << v.span.text() << ")";
  }
  throw ValidationError(out.str());
}

} // namespace

ParsedDiagram parse_dsl(const std::string& text, const std::string& filename) {
  Lexer lexer{text, filename};
  lexer.run();
  Parser parser{filename, std::move(lexer.all)};
  ParsedDiagram d = parser.parse_diagram();
  check_valid(d, filename);
  return d;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

ParsedDiagram parse_dsl_file(const std::string& path) {
  return parse_dsl(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Pretty printer

namespace {

void print_frag(const DiagramPtr& d, int indent, std::ostream& out);

void print_indent(int indent, std::ostream& out) {
  for (int i = 0; i < indent; ++i) out << "  ";
}

void print_event(const Event& e, std::ostream& out) {
  out << (e.kind == Event::Kind::Send ? "send " : "recv ") << e.message << '(';
  bool first = true;
  for (const auto& p : e.params) {
    if (!first) out << ", ";
    first = false;
    out << p;
  }
  out << ") from " << e.sender << " to " << e.receiver;
}

void print_block(const DiagramPtr& d, int indent, std::ostream& out) {
  out << "block {\n";
  for (const auto& l : d->labels) {
    print_indent(indent + 1, out);
    out << l.str() << ": ";
    print_frag(d->body.at(l), indent + 1, out);
    out << ";\n";
  }
  print_indent(indent + 1, out);
  out << "order";
  if (d->order.empty()) {
    out << ";\n";
  } else {
    bool first = true;
    for (const auto& [a, b] : d->order) {
      if (first)
        out << ' ';
      else {
        out << ' ';
      }
      first = false;
      out << a.str() << " -> " << b.str() << ';';
    }
    out << '\n';
  }
  print_indent(indent, out);
  out << '}';
}

void print_frag(const DiagramPtr& d, int indent, std::ostream& out) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
      out << "tau";
      return;
    case Diagram::Kind::Ev:
      print_event(d->event, out);
      return;
    case Diagram::Kind::Opt:
    case Diagram::Kind::Loop:
      out << (d->kind == Diagram::Kind::Opt ? "opt" : "loop") << " ("
          << cond_text(d->guard) << ") {\n";
      print_indent(indent + 1, out);
      print_frag(d->d1, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << '}';
      return;
    case Diagram::Kind::Alt:
      out << "alt (" << cond_text(d->guard) << ") {\n";
      print_indent(indent + 1, out);
      print_frag(d->d1, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << "} else {\n";
      print_indent(indent + 1, out);
      print_frag(d->d2, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << '}';
      return;
    case Diagram::Kind::Critical:
      out << "critical {\n";
      print_indent(indent + 1, out);
      print_frag(d->d1, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << '}';
      return;
    case Diagram::Kind::Par:
    case Diagram::Kind::Strict:
    case Diagram::Kind::Seq: {
      const char* name = d->kind == Diagram::Kind::Par      ? "par"
                         : d->kind == Diagram::Kind::Strict ? "strict"
                                                            : "seq";
      out << name << " {\n";
      print_indent(indent + 1, out);
      print_frag(d->d1, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << "} and {\n";
      print_indent(indent + 1, out);
      print_frag(d->d2, indent + 1, out);
      out << '\n';
      print_indent(indent, out);
      out << '}';
      return;
    }
    case Diagram::Kind::Block:
      print_block(d, indent, out);
      return;
  }
}

} // namespace

std::string print_dsl(const ParsedDiagram& d) {
  std::ostringstream out;
  out << "sd " << d.name << " {\n";
  print_indent(1, out);
  print_frag(d.root, 1, out);
  out << "\n}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Structured format

namespace {

json term_to_json(const Term& t) {
  if (t.is_literal) {
    const char* kind = t.lit_kind == Literal::Kind::Boolean ? "boolean"
                       : t.lit_kind == Literal::Kind::Number ? "number"
                                                             : "symbol";
    return json{{"literal", t.text}, {"lit_kind", kind}};
  }
  return json{{"name", t.text}};
}

Term term_from_json(const json& j, const std::string& where) {
  if (j.contains("name")) return Term::name(j.at("name").get<std::string>());
  if (j.contains("literal"))
    return Term::literal(make_literal(j.at("literal").get<std::string>()));
  throw ParseError(where + ": term must carry 'name' or 'literal'");
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
  }
  return "?";
}

Rel rel_from_name(const std::string& s, const std::string& where) {
  if (s == "=") return Rel::Eq;
  if (s == "!=") return Rel::Ne;
  if (s == "<=") return Rel::Le;
  if (s == "<") return Rel::Lt;
  throw ParseError(where + ": unknown relation '" + s + "'");
}

json cond_to_json(const CondPtr& c) {
  switch (c->kind) {
    case Cond::Kind::True: return json{{"kind", "true"}};
    case Cond::Kind::False: return json{{"kind", "false"}};
    case Cond::Kind::Atom:
      return json{{"kind", "atom"},
                  {"lhs", term_to_json(c->lhs)},
                  {"rel", rel_name(c->rel)},
                  {"rhs", term_to_json(c->rhs)}};
    case Cond::Kind::Not:
      return json{{"kind", "not"}, {"a", cond_to_json(c->a)}};
    case Cond::Kind::And:
    case Cond::Kind::Or:
      return json{{"kind", c->kind == Cond::Kind::And ? "and" : "or"},
                  {"a", cond_to_json(c->a)},
                  {"b", cond_to_json(c->b)}};
  }
  return json{};
}

CondPtr cond_from_json(const json& j, const std::string& where) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "true") return true_cond();
  if (kind == "false") return false_cond();
  if (kind == "atom")
    return atom(term_from_json(j.at("lhs"), where),
                rel_from_name(j.at("rel").get<std::string>(), where),
                term_from_json(j.at("rhs"), where));
  if (kind == "not") return negate(cond_from_json(j.at("a"), where));
  if (kind == "and")
    return conj(cond_from_json(j.at("a"), where),
                cond_from_json(j.at("b"), where));
  if (kind == "or")
    return disj(cond_from_json(j.at("a"), where),
                cond_from_json(j.at("b"), where));
  throw ParseError(where + ": unknown condition kind '" + kind + "'");
}

json event_to_json(const Event& e) {
  return json{{"kind", e.kind == Event::Kind::Send ? "send" : "receive"},
              {"message", e.message},
              {"sender", e.sender},
              {"receiver", e.receiver},
              {"params", e.params}};
}

Event event_from_json(const json& j, const std::string& where) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "send" && kind != "receive")
    throw ParseError(where + ": event kind must be send or receive");
  Event e;
  e.kind = kind == "send" ? Event::Kind::Send : Event::Kind::Receive;
  e.message = j.at("message").get<std::string>();
  e.sender = j.at("sender").get<std::string>();
  e.receiver = j.at("receiver").get<std::string>();
  if (j.contains("params"))
    e.params = j.at("params").get<std::vector<std::string>>();
  return e;
}

Label label_from_string(const std::string& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    return Label::of_number(std::stol(s));
  return Label::of_text(s);
}

json diagram_to_json(const DiagramPtr& d) {
  switch (d->kind) {
    case Diagram::Kind::Tau:
      return json{{"kind", "tau"}};
    case Diagram::Kind::Ev:
      return json{{"kind", "event"}, {"event", event_to_json(d->event)}};
    case Diagram::Kind::Opt:
    case Diagram::Kind::Loop:
      return json{{"kind", d->kind == Diagram::Kind::Opt ? "opt" : "loop"},
                  {"guard", cond_to_json(d->guard)},
                  {"body", diagram_to_json(d->d1)}};
    case Diagram::Kind::Alt:
      return json{{"kind", "alt"},
                  {"guard", cond_to_json(d->guard)},
                  {"then", diagram_to_json(d->d1)},
                  {"else", diagram_to_json(d->d2)}};
    case Diagram::Kind::Critical:
      return json{{"kind", "critical"}, {"body", diagram_to_json(d->d1)}};
    case Diagram::Kind::Par:
    case Diagram::Kind::Strict:
    case Diagram::Kind::Seq: {
      const char* name = d->kind == Diagram::Kind::Par      ? "par"
                         : d->kind == Diagram::Kind::Strict ? "strict"
                                                            : "seq";
      return json{{"kind", name},
                  {"first", diagram_to_json(d->d1)},
                  {"second", diagram_to_json(d->d2)}};
    }
    case Diagram::Kind::Block: {
      json body = json::object();
      json labels = json::array();
      for (const auto& l : d->labels) {
        labels.push_back(l.str());
        body[l.str()] = diagram_to_json(d->body.at(l));
      }
      json order = json::array();
      for (const auto& [a, b] : d->order)
        order.push_back(json::array({a.str(), b.str()}));
      return json{{"kind", "block"},
                  {"labels", labels},
                  {"body", body},
                  {"order", order}};
    }
  }
  return json{};
}

DiagramPtr diagram_from_json(const json& j, const std::string& where) {
  std::string kind = j.at("kind").get<std::string>();
  if (kUnsupported.count(kind))
    throw UnsupportedOperatorError(where + ": interaction operator '" + kind +
                                   "' is not supported");
  if (kind == "tau") return tau();
  if (kind == "event") return ev(event_from_json(j.at("event"), where));
  if (kind == "opt")
    return opt(cond_from_json(j.at("guard"), where),
               diagram_from_json(j.at("body"), where));
  if (kind == "loop")
    return loop(cond_from_json(j.at("guard"), where),
                diagram_from_json(j.at("body"), where));
  if (kind == "alt")
    return alt(cond_from_json(j.at("guard"), where),
               diagram_from_json(j.at("then"), where),
               diagram_from_json(j.at("else"), where));
  if (kind == "critical")
    return critical(diagram_from_json(j.at("body"), where));
  if (kind == "par" || kind == "strict" || kind == "seq") {
    DiagramPtr d1 = diagram_from_json(j.at("first"), where);
    DiagramPtr d2 = diagram_from_json(j.at("second"), where);
    if (kind == "par") return par(d1, d2);
    if (kind == "strict") return strict(d1, d2);
    return seq(d1, d2);
  }
  if (kind == "block") {
    std::map<Label, DiagramPtr> body;
    for (const auto& [key, sub] : j.at("body").items())
      body.emplace(label_from_string(key), diagram_from_json(sub, where));
    std::set<LabelEdge> order;
    for (const auto& edge : j.at("order")) {
      order.insert({label_from_string(edge.at(0).get<std::string>()),
                    label_from_string(edge.at(1).get<std::string>())});
    }
    return make_block(std::move(body), std::move(order));
  }
  throw ParseError(where + ": unknown diagram kind '" + kind + "'");
}

} // namespace

std::string to_json(const ParsedDiagram& d) {
  json j{{"schema_version", kSchemaVersion},
         {"name", d.name},
         {"root", diagram_to_json(d.root)}};
  return j.dump(2) + "\n";
}

ParsedDiagram parse_json(const std::string& text, const std::string& filename) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(filename + ": " + e.what());
  }
  try {
    if (!j.contains("schema_version") ||
        j.at("schema_version").get<int>() != kSchemaVersion)
      throw ParseError(filename + ": missing or unsupported schema_version");
    ParsedDiagram d;
    d.name = j.at("name").get<std::string>();
    d.root = diagram_from_json(j.at("root"), filename);
    check_valid(d, filename);
    return d;
  } catch (const json::exception& e) {
    throw ParseError(filename + ": " + e.what());
  }
}

ParsedDiagram parse_json_file(const std::string& path) {
  return parse_json(read_file(path), path);
}

ParsedDiagram parse_file_any(const std::string& path) {
  auto ends_with = [&](const std::string& suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".json")) return parse_json_file(path);
  return parse_dsl_file(path);
}

CondPtr parse_cond(const std::string& text) {
  Lexer lexer{text, "<cond>"};
  lexer.run();
  Parser parser{lexer.file, std::move(lexer.all)};
  CondPtr c = parser.parse_cond();
  parser.expect(Tok::End, "end of condition");
  return c;
}

// ---------------------------------------------------------------------------
// Substitutions and hidden sets

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

Substitution parse_rho(const std::string& text) {
  Substitution rho;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto arrow = t.find("->");
    if (arrow == std::string::npos)
      throw ParseError("substitution line " + std::to_string(lineno) +
                       ": expected 'from -> to'");
    std::string from = trim(t.substr(0, arrow));
    std::string to = trim(t.substr(arrow + 2));
    if (!is_valid_name(from))
      throw ParseError("substitution line " + std::to_string(lineno) +
                       ": '" + from + "' is not a name");
    if (to.empty())
      throw ParseError("substitution line " + std::to_string(lineno) +
                       ": missing target");
    bool numeric = std::all_of(to.begin(), to.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (numeric || kLiteralWords.count(to))
      rho.set(from, Term::literal(make_literal(to)));
    else if (is_valid_name(to))
      rho.set(from, Term::name(to));
    else
      throw ParseError("substitution line " + std::to_string(lineno) + ": '" +
                       to + "' is neither a name nor a literal");
  }
  return rho;
}

Substitution parse_rho_file(const std::string& path) {
  return parse_rho(read_file(path));
}

HiddenSet parse_hidden(const std::string& spec, const DiagramPtr& d) {
  HiddenSet out;
  if (trim(spec).empty()) return out;
  auto events = events_of(d);
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string t = trim(item);
    if (t.empty()) continue;
    std::size_t matched = 0;
    if (t[0] == '!' || t[0] == '?') {
      Event::Kind kind = t[0] == '!' ? Event::Kind::Send : Event::Kind::Receive;
      auto lp = t.find('(');
      auto rp = t.rfind(')');
      if (lp == std::string::npos || rp == std::string::npos || rp < lp)
        throw InvalidHiddenSetError("malformed event '" + t + "'");
      std::string msg = trim(t.substr(1, lp - 1));
      std::string inner = t.substr(lp + 1, rp - lp - 1);
      auto comma = inner.find(',');
      if (comma == std::string::npos)
        throw InvalidHiddenSetError("event '" + t +
                                    "' must name sender and receiver");
      std::string snd = trim(inner.substr(0, comma));
      std::string rcv = trim(inner.substr(comma + 1));
      // Further parameters in the spec text are ignored for matching.
      auto extra = rcv.find(',');
      if (extra != std::string::npos) rcv = trim(rcv.substr(0, extra));
      for (const auto& e : events) {
        if (e.kind == kind && e.message == msg && e.sender == snd &&
            e.receiver == rcv) {
          out.insert(e);
          ++matched;
        }
      }
    } else {
      for (const auto& e : events) {
        if (e.message == t) {
          out.insert(e);
          ++matched;
        }
      }
    }
    if (matched == 0)
      throw InvalidHiddenSetError("'" + t +
                                  "' matches no event of the diagram");
  }
  return out;
}

} // namespace sdconform
