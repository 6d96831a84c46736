#include "privcomp/kg.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <utility>

#include "privcomp/error.hpp"

namespace privcomp {

bool is_valid_iri(std::string_view value) noexcept {
  if (value.empty()) return false;
  for (unsigned char c : value) {
    if (c <= 0x20 || c == 0x7f) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid_iri(value_)) {
    throw Error(ErrorCode::InvalidArgument, "invalid IRI '" + value_ + "'");
  }
}

namespace {

std::optional<std::int64_t> parse_int64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

Literal::Literal(std::string lexical, Datatype datatype)
    : lexical_(std::move(lexical)), datatype_(datatype) {
  if (datatype_ == Datatype::Integer) {
    auto value = parse_int64(lexical_);
    if (!value) throw Error(ErrorCode::InvalidArgument, "not an integer: '" + lexical_ + "'");
    lexical_ = std::to_string(*value);
  }
}

Literal Literal::integer(std::int64_t value) {
  return Literal(std::to_string(value), Datatype::Integer);
}

std::int64_t Literal::as_integer() const {
  if (datatype_ != Datatype::Integer) {
    throw Error(ErrorCode::InvalidArgument, "literal '" + lexical_ + "' is not an integer");
  }
  return *parse_int64(lexical_);
}

Term to_term(const Node& node) {
  return std::visit([](const auto& v) -> Term { return v; }, node);
}

bool is_variable(const Term& term) noexcept { return std::holds_alternative<Variable>(term); }

std::string to_string(const Term& term) {
  struct Visitor {
    std::string operator()(const Iri& iri) const { return "<" + iri.value() + ">"; }
    std::string operator()(const Variable& v) const { return "?" + v.name; }
    std::string operator()(const Literal& lit) const {
      switch (lit.datatype()) {
        case Datatype::Integer: return lit.lexical();
        case Datatype::AnyUri: return "\"" + lit.lexical() + "\"^^xsd:anyURI";
        case Datatype::String: break;
      }
      return "\"" + lit.lexical() + "\"";
    }
  };
  return std::visit(Visitor{}, term);
}

std::strong_ordering operator<=>(const Triple& a, const Triple& b) {
  if (auto c = a.subject <=> b.subject; c != 0) return c;
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  if (a.object.index() != b.object.index()) return a.object.index() <=> b.object.index();
  if (a.object < b.object) return std::strong_ordering::less;
  if (b.object < a.object) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

TriplePattern to_pattern(const Triple& t) {
  return TriplePattern{t.subject, t.predicate, to_term(t.object)};
}

Triple to_triple(const TriplePattern& pattern) {
  if (is_variable(pattern.subject) || is_variable(pattern.predicate) ||
      is_variable(pattern.object)) {
    throw Error(ErrorCode::NonGroundTriple,
                "triple contains a variable: " + to_string(pattern.subject) + " " +
                    to_string(pattern.predicate) + " " + to_string(pattern.object));
  }
  const Iri* s = std::get_if<Iri>(&pattern.subject);
  const Iri* p = std::get_if<Iri>(&pattern.predicate);
  if (s == nullptr || p == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "subject and predicate must be IRIs");
  }
  Node object = std::holds_alternative<Iri>(pattern.object)
                    ? Node{std::get<Iri>(pattern.object)}
                    : Node{std::get<Literal>(pattern.object)};
  return Triple{*s, *p, std::move(object)};
}

TriplePattern substitute(const TriplePattern& pattern, const Binding& binding) {
  auto sub = [&](const Term& t) -> Term {
    if (const auto* v = std::get_if<Variable>(&t)) {
      if (auto it = binding.find(v->name); it != binding.end()) return it->second;
    }
    return t;
  };
  return TriplePattern{sub(pattern.subject), sub(pattern.predicate), sub(pattern.object)};
}

// ---------------------------------------------------------------------------
// Graph indexes

namespace {

int compare_node(const Node& a, const Node& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_iri(const Iri& a, const Iri& b) {
  const int c = a.value().compare(b.value());
  return (c > 0) - (c < 0);
}

// Prefix probes for heterogeneous lookup: only the engaged positions are
// compared, so equal_range returns every triple sharing that prefix.
struct PosKey {
  const Iri* predicate;
  const Node* object;  // may be null
};
struct OspKey {
  const Node* object;
  const Iri* subject;  // may be null
};

struct PosLess {
  using is_transparent = void;
  static int cmp(const Triple& a, const Triple& b) {
    if (int c = compare_iri(a.predicate, b.predicate)) return c;
    if (int c = compare_node(a.object, b.object)) return c;
    return compare_iri(a.subject, b.subject);
  }
  static int cmp_key(const Triple& t, const PosKey& k) {
    if (int c = compare_iri(t.predicate, *k.predicate)) return c;
    if (k.object != nullptr) return compare_node(t.object, *k.object);
    return 0;
  }
  bool operator()(const Triple* a, const Triple* b) const { return cmp(*a, *b) < 0; }
  bool operator()(const Triple* a, const PosKey& k) const { return cmp_key(*a, k) < 0; }
  bool operator()(const PosKey& k, const Triple* b) const { return cmp_key(*b, k) > 0; }
};

struct OspLess {
  using is_transparent = void;
  static int cmp(const Triple& a, const Triple& b) {
    if (int c = compare_node(a.object, b.object)) return c;
    if (int c = compare_iri(a.subject, b.subject)) return c;
    return compare_iri(a.predicate, b.predicate);
  }
  static int cmp_key(const Triple& t, const OspKey& k) {
    if (int c = compare_node(t.object, *k.object)) return c;
    if (k.subject != nullptr) return compare_iri(t.subject, *k.subject);
    return 0;
  }
  bool operator()(const Triple* a, const Triple* b) const { return cmp(*a, *b) < 0; }
  bool operator()(const Triple* a, const OspKey& k) const { return cmp_key(*a, k) < 0; }
  bool operator()(const OspKey& k, const Triple* b) const { return cmp_key(*b, k) > 0; }
};

struct SpKey {
  const Iri* subject;
  const Iri* predicate;  // may be null
};

int cmp_sp(const Triple& t, const SpKey& k) {
  if (int c = compare_iri(t.subject, *k.subject)) return c;
  if (k.predicate != nullptr) return compare_iri(t.predicate, *k.predicate);
  return 0;
}

// Found by ADL from std::less<> inside the primary set.
bool operator<(const Triple& t, const SpKey& k) { return cmp_sp(t, k) < 0; }
bool operator<(const SpKey& k, const Triple& t) { return cmp_sp(t, k) > 0; }

using PrimarySet = std::set<Triple, std::less<>>;
const PrimarySet kEmptySet;

}  // namespace

struct Graph::Indexes {
  // Node-stable storage; the secondary orderings point into it.
  PrimarySet spo;
  std::set<const Triple*, PosLess> pos;
  std::set<const Triple*, OspLess> osp;

  void add_secondary(const Triple* t) {
    pos.insert(t);
    osp.insert(t);
  }
};

Graph::Graph() : idx_(std::make_unique<Indexes>()) {}

Graph::Graph(const Graph& other) : idx_(std::make_unique<Indexes>()) {
  for (const auto& t : other.idx_->spo) {
    auto it = idx_->spo.insert(idx_->spo.end(), t);
    idx_->add_secondary(&*it);
  }
}

Graph::Graph(Graph&& other) noexcept : idx_(std::exchange(other.idx_, nullptr)) {}

Graph& Graph::operator=(const Graph& other) {
  if (this != &other) *this = Graph(other);
  return *this;
}

Graph& Graph::operator=(Graph&& other) noexcept {
  idx_ = std::exchange(other.idx_, nullptr);
  return *this;
}

Graph::~Graph() = default;

bool Graph::insert(Triple triple) {
  if (!idx_) idx_ = std::make_unique<Indexes>();
  auto [it, inserted] = idx_->spo.insert(std::move(triple));
  if (inserted) idx_->add_secondary(&*it);
  return inserted;
}

bool Graph::contains(const Triple& triple) const {
  return idx_ && idx_->spo.contains(triple);
}

std::size_t Graph::size() const noexcept { return idx_ ? idx_->spo.size() : 0; }

Graph::const_iterator Graph::begin() const noexcept {
  return idx_ ? idx_->spo.begin() : kEmptySet.begin();
}

Graph::const_iterator Graph::end() const noexcept {
  return idx_ ? idx_->spo.end() : kEmptySet.end();
}

std::vector<const Triple*> Graph::candidates(const TriplePattern& pattern) const {
  std::vector<const Triple*> out;
  if (!idx_) return out;
  const Iri* s = std::get_if<Iri>(&pattern.subject);
  const Iri* p = std::get_if<Iri>(&pattern.predicate);
  std::optional<Node> o;
  if (const auto* iri = std::get_if<Iri>(&pattern.object)) o = *iri;
  if (const auto* lit = std::get_if<Literal>(&pattern.object)) o = *lit;
  // A literal in subject or predicate position can never match.
  if (std::holds_alternative<Literal>(pattern.subject) ||
      std::holds_alternative<Literal>(pattern.predicate)) {
    return out;
  }

  auto keep = [&](const Triple& t) {
    return (s == nullptr || t.subject == *s) && (p == nullptr || t.predicate == *p) &&
           (!o || t.object == *o);
  };

  if (s != nullptr && (p != nullptr || !o)) {
    auto [lo, hi] = idx_->spo.equal_range(SpKey{s, p});
    for (auto it = lo; it != hi; ++it) {
      if (keep(*it)) out.push_back(&*it);
    }
  } else if (o) {
    auto [lo, hi] = idx_->osp.equal_range(OspKey{&*o, s});
    for (auto it = lo; it != hi; ++it) {
      if (keep(**it)) out.push_back(*it);
    }
  } else if (p != nullptr) {
    auto [lo, hi] = idx_->pos.equal_range(PosKey{p, nullptr});
    for (auto it = lo; it != hi; ++it) out.push_back(*it);
  } else {
    out.reserve(idx_->spo.size());
    for (const auto& t : idx_->spo) out.push_back(&t);
  }
  return out;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.size() != b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

Graph assert_triple(Graph graph, Triple triple) {
  graph.insert(std::move(triple));
  return graph;
}

Graph assert_triple(Graph graph, const TriplePattern& pattern) {
  graph.insert(to_triple(pattern));
  return graph;
}

namespace {

// Binds `term` (from the pattern) to `value`; fails on a conflicting earlier
// binding of the same variable.
bool bind_term(const Term& term, const Term& value, Binding& binding) {
  const auto* var = std::get_if<Variable>(&term);
  if (var == nullptr) return true;
  auto [it, inserted] = binding.emplace(var->name, value);
  return inserted || it->second == value;
}

}  // namespace

void match_extend(const Graph& graph, const TriplePattern& pattern, const Binding& seed,
                  std::vector<Binding>& out) {
  const TriplePattern bound = substitute(pattern, seed);
  for (const Triple* t : graph.candidates(bound)) {
    Binding b = seed;
    if (bind_term(bound.subject, t->subject, b) && bind_term(bound.predicate, t->predicate, b) &&
        bind_term(bound.object, to_term(t->object), b)) {
      out.push_back(std::move(b));
    }
  }
}

std::vector<Binding> match(const Graph& graph, const TriplePattern& pattern) {
  std::vector<Binding> out;
  match_extend(graph, pattern, Binding{}, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace privcomp
