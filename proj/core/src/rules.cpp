#include "privcomp/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "privcomp/error.hpp"
#include "privcomp/schema.hpp"
#include "text_util.hpp"

namespace privcomp {

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (const auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
}

std::set<std::string> body_vars(const Rule& rule) {
  std::set<std::string> vars;
  for (const auto& atom : rule.body) {
    collect_vars(atom.subject, vars);
    collect_vars(atom.object, vars);
  }
  return vars;
}

}  // namespace

bool is_safe(const Rule& rule) {
  if (rule.body.empty()) return false;
  const auto vars = body_vars(rule);
  for (const Term* t : {&rule.head.subject, &rule.head.object}) {
    if (const auto* v = std::get_if<Variable>(t); v && !vars.contains(v->name)) return false;
  }
  return true;
}

RuleSet::RuleSet(std::vector<Rule> rules) {
  for (auto& rule : rules) add(std::move(rule));
}

void RuleSet::add(Rule rule) {
  if (!is_safe(rule)) {
    throw Error(ErrorCode::UnsafeRule,
                "rule '" + rule.name + "' has an empty body or a head variable missing from it");
  }
  for (const auto& existing : rules_) {
    if (existing.name == rule.name) {
      throw Error(ErrorCode::DuplicateRule, "rule name '" + rule.name + "' repeated");
    }
  }
  rules_.push_back(std::move(rule));
}

void RuleSet::append(const RuleSet& other) {
  for (const auto& rule : other.rules()) add(rule);
}

RuleSet builtin_rules(const std::set<ObligationRole>& roles) {
  if (roles.empty()) throw Error(ErrorCode::EmptyRoleSet, "no obligation roles selected");
  static constexpr std::pair<ObligationRole, const char*> kNames[] = {
      {ObligationRole::Provider, "S1"},
      {ObligationRole::Common, "S2"},
      {ObligationRole::Consumer, "S3"},
      {ObligationRole::DataSubject, "S4"},
      {ObligationRole::General, "S5"},
  };
  const Vocabulary& v = vocab();
  const Variable provider{"cloud_provider"};
  const Variable article{"gdpr_article"};
  RuleSet out;
  for (const auto& [role, name] : kNames) {
    if (!roles.contains(role)) continue;
    out.add(Rule{name,
                 {
                     RuleAtom{v.type, provider, v.providers},
                     RuleAtom{v.type, article, v.article_class},
                     RuleAtom{v.defines_obligations_for, article, v.obligation_instance(role)},
                 },
                 RuleAtom{v.requires_compliance_with, provider, article}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule text

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class RuleLineParser {
 public:
  RuleLineParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  Rule parse() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    if (name.empty()) fail("expected rule name");
    skip_ws();
    expect(':');
    std::vector<RuleAtom> body{atom()};
    for (;;) {
      skip_ws();
      if (consume("^")) {
        body.push_back(atom());
        continue;
      }
      if (consume("->")) break;
      fail("expected '^' or '->'");
    }
    RuleAtom head = atom();
    skip_ws();
    if (!at_end()) fail("unexpected text after rule head");
    return Rule{std::move(name), std::move(body), std::move(head)};
  }

 private:
  RuleAtom atom() {
    skip_ws();
    const Iri predicate = iri_name();
    skip_ws();
    expect('(');
    const Term first = term();
    skip_ws();
    if (consume(")")) {
      // Class atom.
      return RuleAtom{vocab().type, first, predicate};
    }
    expect(',');
    const Term second = term();
    skip_ws();
    expect(')');
    return RuleAtom{predicate, first, second};
  }

  Term term() {
    skip_ws();
    if (at_end()) fail("expected term");
    const char c = peek();
    if (c == '?') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
        ++pos_;
      }
      if (pos_ == start) fail("empty variable name");
      return Variable{std::string(text_.substr(start, pos_ - start))};
    }
    if (c == '"') return string_literal();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      try {
        return Literal(std::string(text_.substr(start, pos_ - start)), Datatype::Integer);
      } catch (const Error&) {
        fail("malformed integer");
      }
    }
    return iri_name();
  }

  Literal string_literal() {
    ++pos_;
    std::string value;
    for (;;) {
      if (at_end()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\' && !at_end()) {
        const char e = text_[pos_++];
        value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        continue;
      }
      value += c;
    }
    return Literal::string(std::move(value));
  }

  Iri iri_name() {
    if (at_end()) fail("expected a name");
    if (peek() == '<') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && peek() != '>') ++pos_;
      if (at_end()) fail("unterminated <iri>");
      std::string value(text_.substr(start, pos_ - start));
      ++pos_;
      if (!is_valid_iri(value)) fail("invalid IRI <" + value + ">");
      return Iri(std::move(value));
    }
    if (!is_name_start(peek())) fail("expected a name");
    const std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    std::string_view first = text_.substr(start, pos_ - start);
    if (!at_end() && peek() == ':' && pos_ + 1 < text_.size() && is_name_start(text_[pos_ + 1])) {
      ++pos_;
      const std::size_t local_start = pos_;
      while (!at_end() && is_name_char(peek())) ++pos_;
      const std::string local(text_.substr(local_start, pos_ - local_start));
      if (first == "cc") return resolve_local(local);
      if (first == "rdf") return Iri(std::string(kRdfNamespace) + local);
      if (first == "xsd") return Iri(std::string(kXsdNamespace) + local);
      fail("unknown prefix '" + std::string(first) + ":'");
    }
    return resolve_local(std::string(first));
  }

  static Iri resolve_local(const std::string& local) {
    if (local == "Cloud_Providers") return vocab().providers;
    return cc(local);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::RuleSyntax, message + " at column " + std::to_string(pos_ + 1), line_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

std::string name_of(const Iri& iri) {
  const std::string& v = iri.value();
  auto local_ok = [](std::string_view local) {
    if (local.empty() || !is_name_start(local.front())) return false;
    return std::all_of(local.begin(), local.end(), is_name_char);
  };
  if (v.starts_with(kCcNamespace) && local_ok(std::string_view(v).substr(kCcNamespace.size()))) {
    return v.substr(kCcNamespace.size());
  }
  if (v.starts_with(kRdfNamespace) && local_ok(std::string_view(v).substr(kRdfNamespace.size()))) {
    return "rdf:" + v.substr(kRdfNamespace.size());
  }
  return "<" + v + ">";
}

std::string term_text(const Term& t) {
  if (const auto* iri = std::get_if<Iri>(&t)) return name_of(*iri);
  if (const auto* var = std::get_if<Variable>(&t)) return "?" + var->name;
  const auto& lit = std::get<Literal>(t);
  if (lit.datatype() == Datatype::Integer) return lit.lexical();
  std::string out = "\"";
  for (char c : lit.lexical()) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RuleSet parse_rules(std::string_view text) {
  RuleSet rules;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty() || line.starts_with('#')) continue;
    Rule rule = RuleLineParser(line, i + 1).parse();
    try {
      rules.add(std::move(rule));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), i + 1);
    }
  }
  return rules;
}

std::string to_string(const RuleAtom& atom) {
  if (atom.predicate == vocab().type && std::holds_alternative<Iri>(atom.object)) {
    return name_of(std::get<Iri>(atom.object)) + "(" + term_text(atom.subject) + ")";
  }
  return name_of(atom.predicate) + "(" + term_text(atom.subject) + ", " + term_text(atom.object) +
         ")";
}

std::string to_string(const Rule& rule) {
  std::string out = rule.name + ": ";
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i > 0) out += " ^ ";
    out += to_string(rule.body[i]);
  }
  return out + " -> " + to_string(rule.head);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::size_t bound_positions(const RuleAtom& atom, const std::set<std::string>& bound) {
  std::size_t n = 1;  // predicate is always ground
  for (const Term* t : {&atom.subject, &atom.object}) {
    const auto* v = std::get_if<Variable>(t);
    if (v == nullptr || bound.contains(v->name)) ++n;
  }
  return n;
}

// Greedy join order: after `first`, repeatedly pick the atom with the most
// bound positions, earliest on ties.
std::vector<std::size_t> join_order(const Rule& rule, std::optional<std::size_t> first) {
  std::vector<std::size_t> order;
  std::vector<bool> used(rule.body.size(), false);
  std::set<std::string> bound;
  auto take = [&](std::size_t i) {
    order.push_back(i);
    used[i] = true;
    collect_vars(rule.body[i].subject, bound);
    collect_vars(rule.body[i].object, bound);
  };
  if (first) take(*first);
  while (order.size() < rule.body.size()) {
    std::size_t best = rule.body.size();
    std::size_t best_bound = 0;
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (used[i]) continue;
      const std::size_t b = bound_positions(rule.body[i], bound);
      if (best == rule.body.size() || b > best_bound) {
        best = i;
        best_bound = b;
      }
    }
    take(best);
  }
  return order;
}

// Derives head triples; body atom `delta_pos` (if set) is matched against
// `delta`, all others against `full`.
void derive(const Graph& full, const Graph* delta, std::optional<std::size_t> delta_pos,
            const Rule& rule, std::set<Triple>& out) {
  const auto order = join_order(rule, delta_pos);
  std::vector<Binding> current{Binding{}};
  for (std::size_t step = 0; step < order.size() && !current.empty(); ++step) {
    const std::size_t i = order[step];
    const Graph& source = (delta_pos && i == *delta_pos) ? *delta : full;
    std::vector<Binding> next;
    for (const auto& b : current) match_extend(source, rule.body[i].pattern(), b, next);
    current = std::move(next);
  }
  for (const auto& b : current) {
    const TriplePattern head = substitute(rule.head.pattern(), b);
    // A variable bound to a literal cannot become a subject.
    if (!std::holds_alternative<Iri>(head.subject)) continue;
    Triple t = to_triple(head);
    if (!full.contains(t)) out.insert(std::move(t));
  }
}

}  // namespace

std::set<Triple> apply_rule(const Graph& graph, const Rule& rule) {
  if (!is_safe(rule)) throw Error(ErrorCode::UnsafeRule, "rule '" + rule.name + "' is unsafe");
  std::set<Triple> out;
  derive(graph, nullptr, std::nullopt, rule, out);
  return out;
}

Graph infer_fixpoint(Graph graph, const RuleSet& rules, const InferenceOptions& options,
                     InferenceStats* stats) {
  InferenceStats local;
  std::set<Triple> fresh;
  for (const auto& rule : rules.rules()) derive(graph, nullptr, std::nullopt, rule, fresh);

  while (!fresh.empty()) {
    if (local.rounds >= options.iteration_cap) {
      throw Error(ErrorCode::IterationCap,
                  "no fixpoint after " + std::to_string(options.iteration_cap) + " rounds");
    }
    ++local.rounds;
    Graph delta;
    for (const auto& t : fresh) {
      graph.insert(t);
      delta.insert(t);
    }
    local.derived += fresh.size();
    fresh.clear();
    // Only derivations using at least one triple from the last round can be new.
    for (const auto& rule : rules.rules()) {
      for (std::size_t i = 0; i < rule.body.size(); ++i) derive(graph, &delta, i, rule, fresh);
    }
  }
  if (stats != nullptr) *stats = local;
  return graph;
}

}  // namespace privcomp
