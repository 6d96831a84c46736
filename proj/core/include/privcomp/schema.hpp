#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "privcomp/kg.hpp"
#include "privcomp/regulation.hpp"

namespace privcomp {

inline constexpr std::string_view kCcNamespace = "https://privcomp.example/ns#";
inline constexpr std::string_view kRdfNamespace = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema#";

Iri cc(std::string_view local);

// Compliance knowledge-graph vocabulary.
struct Vocabulary {
  Iri type;

  // classes
  Iri providers;
  Iri regulations;
  Iri chapter_class;
  Iri article_class;
  Iri obligation_class;

  // object properties
  Iri has_regulation;
  Iri complies_with_section;
  Iri requires_compliance_with;
  Iri part_of_chapter;
  Iri defines_obligations_for;

  // data properties
  Iri has_chapter_index;
  Iri has_section_index;
  Iri has_section_text;
  Iri has_section_url;

  const Iri& obligation_instance(ObligationRole role) const;

  std::vector<Iri> all() const;

 private:
  friend const Vocabulary& vocab();
  Vocabulary();
  Iri consumer_obligations_;
  Iri common_obligations_;
  Iri data_subject_obligations_;
  Iri general_obligations_;
  Iri provider_obligations_;
};

const Vocabulary& vocab();

Iri provider_iri(std::string_view provider_id);
Iri regulation_iri(std::string_view regulation_id);
Iri chapter_iri(std::string_view regulation_id, int chapter_index);
Iri article_iri(std::string_view regulation_id, int article_number);

/// Adds chapters, articles and obligation instances of `doc` plus one
/// definesObligationsFor triple per assignment. Every article gets type,
/// hasSectionIndex (article number), hasSectionText (paragraphs joined by
/// '\n'), partOfChapter and hasSectionURL when present.
Graph populate_regulation(Graph graph, const RegulationDoc& doc,
                          const std::vector<ObligationAssignment>& obligations);

// Types the provider and links it to the regulation via hasRegulation.
Graph populate_provider(Graph graph, std::string_view provider_id,
                        std::string_view regulation_id);

}  // namespace privcomp
