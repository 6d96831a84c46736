#include <gtest/gtest.h>

#include "privcomp/error.hpp"
#include "privcomp/policy.hpp"
#include "test_support.hpp"

namespace privcomp {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

TEST(LoadPolicies, TwoProvidersThreeSegments) {
  std::string src;
  for (const char* p : {"a.com", "b.org"}) {
    src += std::string("#PROVIDER ") + p + " Name of " + p + "\n";
    for (int s = 1; s <= 3; ++s) src += "#SEG s" + std::to_string(s) + " cat\ntext " + p + "\n";
  }
  const auto docs = load_policies(src);
  ASSERT_EQ(docs.size(), 2u);
  std::size_t segments = 0;
  for (const auto& d : docs) segments += d.segments.size();
  EXPECT_EQ(segments, 6u);
  EXPECT_EQ(docs[0].provider_name, "Name of a.com");
  EXPECT_EQ(docs[1].segments[2].category, "cat");
}

TEST(LoadPolicies, NameDefaultsToIdAndCategoryOptional) {
  const auto docs = load_policies("#PROVIDER lids.com\n#SEG s1\nWe sell hats.\n");
  EXPECT_EQ(docs[0].provider_name, "lids.com");
  EXPECT_FALSE(docs[0].segments[0].category.has_value());
}

TEST(LoadPolicies, Errors) {
  EXPECT_EQ(code_of([] { load_policies("#PROVIDER a x\n#SEG s\nt\n#PROVIDER a y\n#SEG s\nt\n"); }),
            ErrorCode::DuplicateProvider);
  EXPECT_EQ(code_of([] { load_policies("#PROVIDER a x\n#SEG s\n\n#SEG t\nx\n"); }),
            ErrorCode::EmptySegment);
  EXPECT_EQ(code_of([] { load_policies("#PROVIDER a x\n"); }), ErrorCode::MalformedSource);
  EXPECT_EQ(code_of([] { load_policies("#PROVIDER Bad_Caps x\n#SEG s\nt\n"); }),
            ErrorCode::MalformedSource);
  EXPECT_EQ(code_of([] { load_policies("#SEG s\nt\n"); }), ErrorCode::MalformedSource);
  EXPECT_EQ(code_of([] { load_policies("#PROVIDER a x\n#SEG s\nt\n#SEG s\nu\n"); }),
            ErrorCode::MalformedSource);
}

TEST(LoadPolicies, DeterministicAndRoundTrips) {
  const std::string src = testing::read_file(testing::data_dir() / "mini" / "policies.txt");
  const auto docs = load_policies(src);
  EXPECT_EQ(docs, load_policies(src));
  EXPECT_EQ(load_policies(serialize_policies(docs)), docs);
  EXPECT_EQ(docs.size(), 5u);
}

TEST(ProviderSlug, Shapes) {
  EXPECT_TRUE(is_provider_slug("lids.com"));
  EXPECT_TRUE(is_provider_slug("a-b_c.9"));
  EXPECT_FALSE(is_provider_slug(""));
  EXPECT_FALSE(is_provider_slug("-lead"));
  EXPECT_FALSE(is_provider_slug("Upper"));
  EXPECT_FALSE(is_provider_slug("sp ace"));
}

TEST(FilterShortSegments, DropsShortOnes) {
  std::vector<PolicyDocument> docs = {
      {"p", "P", {{"a", words(3), {}}, {"b", words(10), {}}, {"c", words(25), {}}}}};
  const auto out = filter_short_segments(docs, 5);
  ASSERT_EQ(out[0].segments.size(), 2u);
  EXPECT_EQ(out[0].segments[0].segment_id, "b");
  EXPECT_EQ(filter_short_segments(docs, 1), docs);
}

TEST(FilterShortSegments, DropsEmptiedDocuments) {
  std::vector<PolicyDocument> docs = {{"p", "P", {{"a", words(2), {}}}},
                                      {"q", "Q", {{"a", words(12), {}}}}};
  const auto out = filter_short_segments(docs, 10);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].provider_id, "q");
}

TEST(FilterShortSegments, MatchesBruteForceAndIsIdempotent) {
  testing::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PolicyDocument> docs;
    for (std::size_t p = 0; p < 1 + testing::pick(rng, 5); ++p) {
      PolicyDocument d{"p" + std::to_string(p), "P", {}};
      for (std::size_t s = 0; s < 1 + testing::pick(rng, 6); ++s) {
        std::string text;
        const std::size_t n = 1 + testing::pick(rng, 20);
        for (std::size_t w = 0; w < n; ++w) text += std::string(1 + testing::pick(rng, 3), ' ') + "x";
        d.segments.push_back({"s" + std::to_string(s), text, {}});
      }
      docs.push_back(d);
    }
    const std::size_t min_tokens = 1 + testing::pick(rng, 15);
    std::size_t expected = 0;
    for (const auto& d : docs) {
      for (const auto& s : d.segments) {
        std::size_t tokens = 0;
        bool in = false;
        for (char c : s.text) {
          const bool space = c == ' ' || c == '\t' || c == '\n';
          if (!space && !in) ++tokens;
          in = !space;
        }
        if (tokens >= min_tokens) ++expected;
      }
    }
    const auto out = filter_short_segments(docs, min_tokens);
    std::size_t got = 0;
    for (const auto& d : out) {
      EXPECT_FALSE(d.segments.empty());
      got += d.segments.size();
    }
    EXPECT_EQ(got, expected);
    EXPECT_EQ(filter_short_segments(out, min_tokens), out);
  }
}

TEST(GroundTruth, LoadAndRestrict) {
  const auto docs = load_policies(testing::read_file(testing::data_dir() / "mini" / "policies.txt"));
  const auto truth =
      load_ground_truth(testing::read_file(testing::data_dir() / "mini" / "truth.csv"), docs);
  EXPECT_EQ(truth.articles.at({"acme-cloud", "s1"}), std::set<int>{5});
  EXPECT_EQ(code_of([&] { load_ground_truth("acme-cloud,s99,5\n", docs); }),
            ErrorCode::UnknownSegment);
  EXPECT_EQ(code_of([&] { load_ground_truth("nobody,s1,5\n", docs); }), ErrorCode::UnknownSegment);
  EXPECT_EQ(code_of([&] { load_ground_truth("acme-cloud,s1,0\n", docs); }),
            ErrorCode::MalformedSource);
  EXPECT_EQ(code_of([&] { load_ground_truth("acme-cloud,s1\n", docs); }),
            ErrorCode::MalformedSource);

  const auto kept = filter_short_segments(docs, 1000);
  EXPECT_TRUE(restrict_ground_truth(truth, kept).articles.empty());
  EXPECT_EQ(restrict_ground_truth(truth, docs), truth);
}

}  // namespace
}  // namespace privcomp
