#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "privcomp/kg.hpp"
#include "privcomp/regulation.hpp"

namespace privcomp {

// predicate(subject, object); a class atom C(?x) is (type, ?x, C).
struct RuleAtom {
  Iri predicate;
  Term subject;
  Term object;

  TriplePattern pattern() const { return {subject, predicate, object}; }
  friend bool operator==(const RuleAtom&, const RuleAtom&) = default;
};

struct Rule {
  std::string name;
  std::vector<RuleAtom> body;
  RuleAtom head;

  friend bool operator==(const Rule&, const Rule&) = default;
};

// Every head variable occurs in the body, and the body is non-empty.
bool is_safe(const Rule& rule);

/// Ordered rules with unique names, all safe. Throws UnsafeRule or
/// DuplicateRule on construction.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  void add(Rule rule);
  void append(const RuleSet& other);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

 private:
  std::vector<Rule> rules_;
};

inline const std::set<ObligationRole> kDefaultRuleRoles = {ObligationRole::Provider,
                                                           ObligationRole::Common};

/// One rule per role:
///   Providers(?cloud_provider) ^ GDPR_Articles(?gdpr_article)
///     ^ definesObligationsFor(?gdpr_article, <Role>_Obligations)
///     -> requiresComplianceWith(?cloud_provider, ?gdpr_article)
/// named S1 (Provider), S2 (Common), S3 (Consumer), S4 (DataSubject),
/// S5 (General), in that order. Throws EmptyRoleSet.
RuleSet builtin_rules(const std::set<ObligationRole>& roles = kDefaultRuleRoles);

/// One rule per line: `name: Atom ^ Atom ... -> Atom`. Atoms are
/// `pred(term, term)` or `Class(term)`; terms are `?var`, bare names (in the
/// cc: namespace), `rdf:`/`xsd:`/`cc:` prefixed names, `<iri>`, "strings" or
/// integers. `Cloud_Providers` is an alias of `Providers`. Lines starting
/// with '#' are comments. Throws RuleSyntax, UnsafeRule, DuplicateRule.
RuleSet parse_rules(std::string_view text);

std::string to_string(const RuleAtom& atom);
std::string to_string(const Rule& rule);

// Head instantiations for every binding that satisfies the body in `graph`,
// minus triples already in `graph`.
std::set<Triple> apply_rule(const Graph& graph, const Rule& rule);

struct InferenceOptions {
  std::size_t iteration_cap = 10'000;
};

struct InferenceStats {
  std::size_t rounds = 0;
  std::size_t derived = 0;
};

/// Least fixpoint of `rules` over `graph` by round-synchronous semi-naive
/// evaluation. Throws IterationCap if more than options.iteration_cap rounds
/// are needed.
Graph infer_fixpoint(Graph graph, const RuleSet& rules, const InferenceOptions& options = {},
                     InferenceStats* stats = nullptr);

}  // namespace privcomp
