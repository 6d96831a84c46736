#include <gtest/gtest.h>

#include "privcomp/compliance.hpp"
#include "privcomp/error.hpp"
#include "privcomp/rules.hpp"
#include "test_support.hpp"

namespace privcomp {
namespace {

// A provider with `required` articles marked Provider and `complied`
// recorded, over a regulation of `n` one-paragraph articles.
Graph scenario(int n, const std::set<int>& required, const std::set<int>& complied) {
  const auto doc = parse_regulation(testing::regulation_source(std::vector<int>(n, 1), 10));
  std::vector<ObligationAssignment> obligations;
  for (int a : required) obligations.push_back({a, ObligationRole::Provider});
  Graph g = populate_regulation(Graph{}, doc, obligations);
  g = populate_provider(std::move(g), "lids.com", "TST");
  g = record_compliance(std::move(g), "lids.com", complied);
  return infer_fixpoint(std::move(g), builtin_rules());
}

TEST(RecordCompliance, Errors) {
  const auto doc = parse_regulation(testing::regulation_source({1, 1}));
  Graph g = populate_regulation(Graph{}, doc, {});
  try {
    record_compliance(g, "nobody", {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownProvider);
  }
  g = populate_provider(std::move(g), "p", "TST");
  try {
    record_compliance(g, "p", {3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownArticle);
  }
  EXPECT_EQ(record_compliance(g, "p", {}), g);
}

TEST(ComputeGap, FortySevenRequiredSevenComplied) {
  std::set<int> required, complied;
  for (int a = 1; a <= 47; ++a) required.insert(a);
  for (int a = 1; a <= 7; ++a) complied.insert(a);
  const auto report = compute_gap(scenario(99, required, complied), "lids.com");
  EXPECT_EQ(report.required.size(), 47u);
  EXPECT_EQ(report.complied.size(), 7u);
  EXPECT_EQ(report.missing.size(), 40u);
  EXPECT_EQ(report.missing.front(), 8);
  EXPECT_FALSE(report.fully_compliant());
  EXPECT_NE(render_report(report, ReportFormat::Machine).find("missing 40\n"), std::string::npos);
}

TEST(ComputeGap, FullyCompliantAndExtraComplied) {
  const auto report = compute_gap(scenario(10, {1, 2}, {1, 2, 9}), "lids.com");
  EXPECT_TRUE(report.fully_compliant());
  EXPECT_EQ(report.complied, (std::vector<int>{1, 2, 9}));
  EXPECT_EQ(render_report(report, ReportFormat::Machine),
            "provider lids.com required 2 complied 3 missing 0\n");
}

TEST(ComputeGap, EmptyRequired) {
  const auto report = compute_gap(scenario(5, {}, {1}), "lids.com");
  EXPECT_TRUE(report.required.empty());
  EXPECT_TRUE(report.missing.empty());
}

TEST(ComputeGap, UnknownProvider) {
  try {
    compute_gap(scenario(3, {1}, {}), "nobody");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownProvider);
  }
}

TEST(ComputeGap, EqualsSetDifferenceOnRandomPairs) {
  testing::Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    std::set<int> required, complied;
    for (int a = 1; a <= 30; ++a) {
      if (testing::pick(rng, 2)) required.insert(a);
      if (testing::pick(rng, 2)) complied.insert(a);
    }
    const auto report = compute_gap(scenario(30, required, complied), "lids.com");
    std::vector<int> expected;
    std::set_difference(required.begin(), required.end(), complied.begin(), complied.end(),
                        std::back_inserter(expected));
    EXPECT_EQ(report.missing, expected);
    EXPECT_EQ(report.missing_details.size(), report.missing.size());
  }
}

TEST(ComputeGap, DetailsUseTitlesAndUrls) {
  const auto doc =
      parse_regulation(testing::read_file(testing::data_dir() / "mini" / "regulation.reg"));
  std::vector<ObligationAssignment> obligations = {{32, ObligationRole::Provider},
                                                   {33, ObligationRole::Provider}};
  Graph g = populate_regulation(Graph{}, doc, obligations);
  g = populate_provider(std::move(g), "p", doc.regulation_id);
  g = infer_fixpoint(record_compliance(std::move(g), "p", {32}), builtin_rules());
  const ArticleTitles titles = article_titles(doc);

  const auto report = compute_gap(g, "p", &titles);
  ASSERT_EQ(report.missing, std::vector<int>{33});
  const auto& d = report.missing_details[0];
  EXPECT_EQ(d.title, "Notification of a personal data breach to the supervisory authority");
  EXPECT_EQ(d.url, "https://gdpr-info.eu/art-33-gdpr/");
  EXPECT_LE(d.excerpt.size(), 160u);
  EXPECT_EQ(d.excerpt.rfind("In the case of a personal data breach", 0), 0u);
  EXPECT_EQ(compute_gap(g, "p").missing_details[0].title, "Article 33");

  const std::string human = render_report(report, ReportFormat::Human);
  EXPECT_NE(human.find("Article 33: Notification"), std::string::npos);
  EXPECT_NE(human.find("https://gdpr-info.eu/art-33-gdpr/"), std::string::npos);
  EXPECT_EQ(render_report(report, ReportFormat::Machine),
            "provider p required 2 complied 1 missing 1\n"
            "missing 33 Notification of a personal data breach to the supervisory authority\n");
}

}  // namespace
}  // namespace privcomp
