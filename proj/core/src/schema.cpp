#include "privcomp/schema.hpp"

#include <set>

#include "privcomp/error.hpp"
#include "privcomp/policy.hpp"

namespace privcomp {

Iri cc(std::string_view local) {
  std::string value(kCcNamespace);
  value += local;
  return Iri(std::move(value));
}

Vocabulary::Vocabulary()
    : type(std::string(kRdfNamespace) + "type"),
      providers(cc("Providers")),
      regulations(cc("Regulations")),
      chapter_class(cc("GDPR_Chapter")),
      article_class(cc("GDPR_Articles")),
      obligation_class(cc("GDPR_Obligations")),
      has_regulation(cc("hasRegulation")),
      complies_with_section(cc("compliesWithSection")),
      requires_compliance_with(cc("requiresComplianceWith")),
      part_of_chapter(cc("partOfChapter")),
      defines_obligations_for(cc("definesObligationsFor")),
      has_chapter_index(cc("hasChapterIndex")),
      has_section_index(cc("hasSectionIndex")),
      has_section_text(cc("hasSectionText")),
      has_section_url(cc("hasSectionURL")),
      consumer_obligations_(cc("Consumer_Obligations")),
      common_obligations_(cc("Common_Obligations")),
      data_subject_obligations_(cc("Data_Subject_Obligations")),
      general_obligations_(cc("General_Obligations")),
      provider_obligations_(cc("Provider_Obligations")) {}

const Iri& Vocabulary::obligation_instance(ObligationRole role) const {
  switch (role) {
    case ObligationRole::Consumer: return consumer_obligations_;
    case ObligationRole::Common: return common_obligations_;
    case ObligationRole::DataSubject: return data_subject_obligations_;
    case ObligationRole::General: return general_obligations_;
    case ObligationRole::Provider: return provider_obligations_;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown obligation role");
}

std::vector<Iri> Vocabulary::all() const {
  std::vector<Iri> out = {type,
                          providers,
                          regulations,
                          chapter_class,
                          article_class,
                          obligation_class,
                          has_regulation,
                          complies_with_section,
                          requires_compliance_with,
                          part_of_chapter,
                          defines_obligations_for,
                          has_chapter_index,
                          has_section_index,
                          has_section_text,
                          has_section_url};
  for (auto role : kAllObligationRoles) out.push_back(obligation_instance(role));
  return out;
}

const Vocabulary& vocab() {
  static const Vocabulary instance;
  return instance;
}

Iri provider_iri(std::string_view provider_id) {
  if (!is_provider_slug(provider_id)) {
    throw Error(ErrorCode::InvalidArgument,
                "provider id '" + std::string(provider_id) + "' is not a lowercase slug");
  }
  return cc(provider_id);
}

Iri regulation_iri(std::string_view regulation_id) { return cc(regulation_id); }

Iri chapter_iri(std::string_view regulation_id, int chapter_index) {
  return cc(std::string(regulation_id) + "_Chapter_" + std::to_string(chapter_index));
}

Iri article_iri(std::string_view regulation_id, int article_number) {
  return cc(std::string(regulation_id) + "_Article_" + std::to_string(article_number));
}

Graph populate_regulation(Graph graph, const RegulationDoc& doc,
                          const std::vector<ObligationAssignment>& obligations) {
  const Vocabulary& v = vocab();
  for (const auto& chapter : doc.chapters) {
    const Iri ch = chapter_iri(doc.regulation_id, chapter.index);
    graph.insert({ch, v.type, v.chapter_class});
    graph.insert({ch, v.has_chapter_index, Literal::integer(chapter.index)});
    for (const auto& article : chapter.articles) {
      const Iri art = article_iri(doc.regulation_id, article.number);
      std::string text;
      for (std::size_t i = 0; i < article.paragraphs.size(); ++i) {
        if (i > 0) text += '\n';
        text += article.paragraphs[i].text;
      }
      graph.insert({art, v.type, v.article_class});
      graph.insert({art, v.has_section_index, Literal::integer(article.number)});
      graph.insert({art, v.has_section_text, Literal::string(std::move(text))});
      if (article.source_url) {
        graph.insert({art, v.has_section_url, Literal::any_uri(*article.source_url)});
      }
      graph.insert({art, v.part_of_chapter, ch});
    }
  }
  for (auto role : kAllObligationRoles) {
    graph.insert({v.obligation_instance(role), v.type, v.obligation_class});
  }
  for (const auto& assignment : obligations) {
    if (doc.find_article(assignment.article_number) == nullptr) {
      throw Error(ErrorCode::UnknownArticle, "article " +
                                                 std::to_string(assignment.article_number) +
                                                 " is not in " + doc.regulation_id);
    }
    graph.insert({article_iri(doc.regulation_id, assignment.article_number),
                  v.defines_obligations_for, v.obligation_instance(assignment.role)});
  }
  return graph;
}

Graph populate_provider(Graph graph, std::string_view provider_id,
                        std::string_view regulation_id) {
  const Vocabulary& v = vocab();
  const Iri provider = provider_iri(provider_id);
  const Iri regulation = regulation_iri(regulation_id);
  graph.insert({provider, v.type, v.providers});
  graph.insert({regulation, v.type, v.regulations});
  graph.insert({provider, v.has_regulation, regulation});
  return graph;
}

}  // namespace privcomp
