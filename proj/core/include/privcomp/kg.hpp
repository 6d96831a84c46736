#pragma once

#include <compare>
#include <functional>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace privcomp {

// An absolute (or prefixed-namespace) identifier. Never empty, never contains
// whitespace or any of <>"{}|^`\ so it can always be written as <...>.
class Iri {
 public:
  explicit Iri(std::string value);

  const std::string& value() const noexcept { return value_; }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend std::strong_ordering operator<=>(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

bool is_valid_iri(std::string_view value) noexcept;

enum class Datatype { String, Integer, AnyUri };

// Integer literals are kept in canonical decimal form so that "05" and "5"
// compare equal.
class Literal {
 public:
  Literal(std::string lexical, Datatype datatype);

  static Literal string(std::string value) { return Literal(std::move(value), Datatype::String); }
  static Literal integer(std::int64_t value);
  static Literal any_uri(std::string value) { return Literal(std::move(value), Datatype::AnyUri); }

  const std::string& lexical() const noexcept { return lexical_; }
  Datatype datatype() const noexcept { return datatype_; }
  std::int64_t as_integer() const;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal&, const Literal&) = default;

 private:
  std::string lexical_;
  Datatype datatype_;
};

struct Variable {
  std::string name;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend std::strong_ordering operator<=>(const Variable&, const Variable&) = default;
};

// Ground object position of a stored triple.
using Node = std::variant<Iri, Literal>;
// Any position of a pattern or rule atom.
using Term = std::variant<Iri, Literal, Variable>;

Term to_term(const Node& node);
bool is_variable(const Term& term) noexcept;
std::string to_string(const Term& term);

struct Triple {
  Iri subject;
  Iri predicate;
  Node object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple& a, const Triple& b);
};

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

TriplePattern to_pattern(const Triple& t);

// Throws NonGroundTriple if any position holds a Variable, InvalidArgument if
// a literal sits in subject or predicate position.
Triple to_triple(const TriplePattern& pattern);

using Binding = std::map<std::string, Term>;

TriplePattern substitute(const TriplePattern& pattern, const Binding& binding);

/// A set of ground triples. Equality is set equality and iteration is in
/// (subject, predicate, object) order, independent of insertion order.
///
/// A Graph value is a snapshot: concurrent const access is safe, mutation via
/// insert() requires exclusive access. Copies are independent.
class Graph {
 public:
  Graph();
  Graph(const Graph& other);
  Graph(Graph&& other) noexcept;
  Graph& operator=(const Graph& other);
  Graph& operator=(Graph&& other) noexcept;
  ~Graph();

  // Returns true if the triple was not present before.
  bool insert(Triple triple);
  bool contains(const Triple& triple) const;

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }

  using const_iterator = std::set<Triple, std::less<>>::const_iterator;
  const_iterator begin() const noexcept;
  const_iterator end() const noexcept;

  // Triples compatible with the ground positions of `pattern`; variables act
  // as wildcards (repeated-variable consistency is checked by match()).
  std::vector<const Triple*> candidates(const TriplePattern& pattern) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  struct Indexes;
  std::unique_ptr<Indexes> idx_;
};

Graph assert_triple(Graph graph, Triple triple);
Graph assert_triple(Graph graph, const TriplePattern& pattern);

/// Every binding of the pattern's variables that turns it into a triple of
/// `graph`, sorted by bound-term order. A variable-free pattern yields one
/// empty binding if present and none otherwise.
std::vector<Binding> match(const Graph& graph, const TriplePattern& pattern);

// Extends `seed` with each match of substitute(pattern, seed).
void match_extend(const Graph& graph, const TriplePattern& pattern, const Binding& seed,
                  std::vector<Binding>& out);

}  // namespace privcomp
