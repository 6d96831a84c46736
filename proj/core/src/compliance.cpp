#include "privcomp/compliance.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "privcomp/error.hpp"
#include "privcomp/schema.hpp"

namespace privcomp {

ArticleTitles article_titles(const RegulationDoc& doc) {
  ArticleTitles titles;
  for (const auto& chapter : doc.chapters) {
    for (const auto& article : chapter.articles) titles.emplace(article.number, article.title);
  }
  return titles;
}

namespace {

const Literal* literal_object(const Graph& graph, const Iri& subject, const Iri& predicate) {
  for (const Triple* t : graph.candidates({subject, predicate, Variable{"o"}})) {
    if (const auto* lit = std::get_if<Literal>(&t->object)) return lit;
  }
  return nullptr;
}

bool is_typed(const Graph& graph, const Iri& subject, const Iri& cls) {
  return graph.contains(Triple{subject, vocab().type, cls});
}

std::vector<int> article_numbers(const Graph& graph, const Iri& provider, const Iri& predicate) {
  std::set<int> numbers;
  for (const Triple* t : graph.candidates({provider, predicate, Variable{"x"}})) {
    const auto* article = std::get_if<Iri>(&t->object);
    if (article == nullptr) continue;
    const Literal* index = literal_object(graph, *article, vocab().has_section_index);
    if (index == nullptr || index->datatype() != Datatype::Integer) continue;
    numbers.insert(static_cast<int>(index->as_integer()));
  }
  return {numbers.begin(), numbers.end()};
}

std::string excerpt_of(std::string_view text) {
  constexpr std::size_t kMax = 160;
  std::string flat;
  for (char c : text) flat += (c == '\n' || c == '\t' || c == '\r') ? ' ' : c;
  if (flat.size() <= kMax) return flat;
  std::size_t cut = flat.rfind(' ', kMax);
  if (cut == std::string::npos || cut < kMax / 2) cut = kMax;
  // Do not split a UTF-8 sequence.
  while (cut > 0 && (static_cast<unsigned char>(flat[cut]) & 0xC0) == 0x80) --cut;
  return flat.substr(0, cut) + "...";
}

}  // namespace

std::map<int, Iri> article_index(const Graph& graph) {
  std::map<int, Iri> out;
  const Vocabulary& v = vocab();
  for (const Triple* t : graph.candidates({Variable{"a"}, v.has_section_index, Variable{"n"}})) {
    const auto* lit = std::get_if<Literal>(&t->object);
    if (lit == nullptr || lit->datatype() != Datatype::Integer) continue;
    if (!is_typed(graph, t->subject, v.article_class)) continue;
    out.emplace(static_cast<int>(lit->as_integer()), t->subject);
  }
  return out;
}

Graph record_compliance(Graph graph, std::string_view provider_id, const std::set<int>& articles) {
  const Vocabulary& v = vocab();
  const Iri provider = provider_iri(provider_id);
  if (!is_typed(graph, provider, v.providers)) {
    throw Error(ErrorCode::UnknownProvider,
                "provider '" + std::string(provider_id) + "' is not in the graph");
  }
  const auto index = article_index(graph);
  std::vector<Triple> additions;
  for (int number : articles) {
    auto it = index.find(number);
    if (it == index.end()) {
      throw Error(ErrorCode::UnknownArticle,
                  "article " + std::to_string(number) + " is not in the graph");
    }
    additions.push_back(Triple{provider, v.complies_with_section, it->second});
  }
  for (auto& t : additions) graph.insert(std::move(t));
  return graph;
}

ComplianceReport compute_gap(const Graph& graph, std::string_view provider_id,
                             const ArticleTitles* titles) {
  const Vocabulary& v = vocab();
  const Iri provider = provider_iri(provider_id);
  if (!is_typed(graph, provider, v.providers)) {
    throw Error(ErrorCode::UnknownProvider,
                "provider '" + std::string(provider_id) + "' is not in the graph");
  }
  ComplianceReport report;
  report.provider_id = std::string(provider_id);
  report.required = article_numbers(graph, provider, v.requires_compliance_with);
  report.complied = article_numbers(graph, provider, v.complies_with_section);
  std::set_difference(report.required.begin(), report.required.end(), report.complied.begin(),
                      report.complied.end(), std::back_inserter(report.missing));

  const auto index = article_index(graph);
  for (int number : report.missing) {
    ArticleDetail detail;
    detail.number = number;
    if (titles != nullptr) {
      if (auto it = titles->find(number); it != titles->end()) detail.title = it->second;
    }
    if (detail.title.empty()) detail.title = "Article " + std::to_string(number);
    if (auto it = index.find(number); it != index.end()) {
      if (const Literal* text = literal_object(graph, it->second, v.has_section_text)) {
        detail.excerpt = excerpt_of(text->lexical());
      }
      if (const Literal* url = literal_object(graph, it->second, v.has_section_url)) {
        detail.url = url->lexical();
      }
    }
    report.missing_details.push_back(std::move(detail));
  }
  return report;
}

std::string render_report(const ComplianceReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Machine) {
    out << "provider " << report.provider_id << " required " << report.required.size()
        << " complied " << report.complied.size() << " missing " << report.missing.size() << '\n';
    for (const auto& d : report.missing_details) out << "missing " << d.number << ' ' << d.title << '\n';
    return out.str();
  }

  out << "Provider: " << report.provider_id << '\n';
  out << "  required articles: " << report.required.size() << '\n';
  out << "  complied articles: " << report.complied.size() << '\n';
  out << "  missing articles:  " << report.missing.size() << '\n';
  if (report.fully_compliant()) {
    out << "  status: fully compliant (all " << report.required.size()
        << " required articles addressed)\n";
    return out.str();
  }
  out << "  status: gaps found\n";
  for (const auto& d : report.missing_details) {
    out << "  - Article " << d.number << ": " << d.title << '\n';
    if (d.url) out << "      " << *d.url << '\n';
    if (!d.excerpt.empty()) out << "      " << d.excerpt << '\n';
  }
  return out.str();
}

}  // namespace privcomp
