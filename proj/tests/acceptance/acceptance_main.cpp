// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli/cli.hpp"
#include "privcomp/compliance.hpp"
#include "privcomp/error.hpp"
#include "privcomp/evaluation.hpp"
#include "privcomp/external_backend.hpp"
#include "privcomp/rag.hpp"
#include "privcomp/retrieval.hpp"
#include "privcomp/rules.hpp"
#include "privcomp/schema.hpp"
#include "privcomp/turtle.hpp"
#include "test_support.hpp"

namespace pt = privcomp::testing;
using namespace privcomp;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kScoreTolerance = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Semi-naive fixpoint vs naive exhaustive evaluation.
Outcome rule_engine_oracle() {
  const auto start = Clock::now();
  pt::Rng rng(500);
  const auto u = pt::Universe::make(8, 4);
  int agree = 0;
  std::size_t max_triples = 0, max_rules = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Graph g = pt::random_graph(rng, u, 200);
    RuleSet rules;
    const std::size_t n_rules = 1 + pt::pick(rng, 10);
    for (std::size_t i = 0; i < n_rules; ++i) {
      rules.add(pt::random_safe_rule(rng, u, "r" + std::to_string(i)));
    }
    max_triples = std::max(max_triples, g.size());
    max_rules = std::max(max_rules, rules.size());
    if (infer_fixpoint(g, rules) == pt::naive_fixpoint(g, rules.rules())) ++agree;
  }
  const double secs = seconds_since(start);
  return {agree == 500 && secs < 30.0 && max_triples <= 200 && max_rules <= 10,
          fmt("%d/500 trials set-equal (graphs <= %zu triples, <= %zu rules), %.2f s (limit 30 s)",
              agree, max_triples, max_rules, secs)};
}

// 2. S1/S2 on 3 Provider + 2 Common + 5 General articles.
Outcome s1_s2_semantics() {
  const auto doc = parse_regulation(pt::regulation_source(std::vector<int>(10, 1)));
  std::vector<ObligationAssignment> obligations;
  for (int a = 1; a <= 10; ++a) {
    obligations.push_back({a, a <= 3   ? ObligationRole::Provider
                              : a <= 5 ? ObligationRole::Common
                                       : ObligationRole::General});
  }
  Graph g = populate_provider(populate_regulation(Graph{}, doc, obligations), "lids.com", "TST");
  const Graph out = infer_fixpoint(g, builtin_rules({ObligationRole::Provider, ObligationRole::Common}));
  std::set<Triple> derived;
  for (const auto& t : out) {
    if (!g.contains(t)) derived.insert(t);
  }
  std::set<Triple> expected;
  for (int a = 1; a <= 5; ++a) {
    expected.insert({cc("lids.com"), vocab().requires_compliance_with, article_iri("TST", a)});
  }
  int general = 0;
  for (int a = 6; a <= 10; ++a) {
    general += out.contains({cc("lids.com"), vocab().requires_compliance_with, article_iri("TST", a)});
  }
  return {derived == expected && general == 0,
          fmt("%zu requiresComplianceWith triples inferred (expected 5 = 3 + 2), %d General",
              derived.size(), general)};
}

Graph gap_scenario(int n, const std::set<int>& required, const std::set<int>& complied) {
  const auto doc = parse_regulation(pt::regulation_source(std::vector<int>(n, 1), 10));
  std::vector<ObligationAssignment> obligations;
  for (int a : required) obligations.push_back({a, ObligationRole::Provider});
  Graph g = populate_provider(populate_regulation(Graph{}, doc, obligations), "lids.com", "TST");
  g = record_compliance(std::move(g), "lids.com", complied);
  return infer_fixpoint(std::move(g), builtin_rules());
}

// 3. Gap = required \ complied.
Outcome gap_equivalence() {
  pt::Rng rng(200);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5 + static_cast<int>(pt::pick(rng, 40));
    std::set<int> required, complied;
    for (int a = 1; a <= n; ++a) {
      if (pt::pick(rng, 2)) required.insert(a);
      if (pt::pick(rng, 2)) complied.insert(a);
    }
    std::vector<int> expected;
    std::set_difference(required.begin(), required.end(), complied.begin(), complied.end(),
                        std::back_inserter(expected));
    if (compute_gap(gap_scenario(n, required, complied), "lids.com").missing == expected) ++agree;
  }
  std::set<int> required, complied;
  for (int a = 1; a <= 47; ++a) required.insert(a);
  for (int a = 1; a <= 7; ++a) complied.insert(a);
  const auto report = compute_gap(gap_scenario(99, required, complied), "lids.com");
  return {agree == 200 && report.missing.size() == 40,
          fmt("%d/200 random pairs equal set difference; 47 required / 7 complied -> %zu missing",
              agree, report.missing.size())};
}

// 4. Retrieval nesting and exhaustive-scan equality.
Outcome retrieval_oracle() {
  const auto start = Clock::now();
  pt::Rng rng(50);
  const auto chunks = pt::synthetic_chunks(rng, 50, 12);
  const Index index = build_index(chunks, RetrieverConfig{});
  std::vector<std::string> texts;
  for (const auto& c : chunks) texts.push_back(c.text);
  const pt::ReferenceTfidf ref(texts);

  int queries = 0, failures = 0;
  double worst = 0.0;
  for (int q = 0; q < 20; ++q) {
    const std::string query =
        chunks[pt::pick(rng, chunks.size())].text + " " + chunks[pt::pick(rng, chunks.size())].text;
    std::set<std::string> previous;
    for (double t : {0.2, 0.5, 0.8, 1.1, 1.4}) {
      RetrieverConfig cfg;
      cfg.threshold = t;
      std::set<std::string> got, want;
      for (const auto& h : retrieve(index, query, cfg)) {
        got.insert(h.chunk_id);
        const double d = std::fabs(h.score - ref.distance(query, index.find_chunk(h.chunk_id)->text));
        worst = std::max(worst, d);
        if (d > kScoreTolerance) ++failures;
      }
      for (const auto& c : chunks) {
        if (ref.distance(query, c.text) <= t) want.insert(c.chunk_id);
      }
      if (got != want || !std::includes(got.begin(), got.end(), previous.begin(), previous.end())) {
        ++failures;
      }
      previous = got;
    }
    ++queries;
  }
  const double secs = seconds_since(start);
  return {failures == 0 && secs < 5.0,
          fmt("%d queries x 5 thresholds on 50 chunks: %d mismatches, max |score diff| %.1e "
              "(tol 1e-9), %.2f s (limit 5 s)",
              queries, failures, worst, secs)};
}

// 5. Sweep: recall monotone and every point equals a brute-force tally.
Outcome sweep_behavior() {
  pt::Rng rng(115);
  const auto chunks = pt::synthetic_chunks(rng, 60, 10);
  std::vector<std::string> texts;
  for (const auto& c : chunks) texts.push_back(c.text);
  const pt::ReferenceTfidf ref(texts);

  // Each segment paraphrases one chunk; the truth is that chunk's article,
  // sometimes plus a second article it also quotes.
  PolicyDocument doc{"synthetic.example", "Synthetic", {}};
  GroundTruth truth;
  for (int s = 0; s < 40; ++s) {
    const auto& src = chunks[pt::pick(rng, chunks.size())];
    std::string text;
    for (const auto& w : tokenize(src.text)) {
      if (pt::pick(rng, 3) != 0) text += w + " ";
    }
    std::set<int> articles{src.article_number};
    if (pt::pick(rng, 4) == 0) {
      const auto& extra = chunks[pt::pick(rng, chunks.size())];
      text += tokenize(extra.text).front() + " " + tokenize(extra.text).back();
      articles.insert(extra.article_number);
    }
    text += " policy text";
    const std::string id = "s" + std::to_string(s);
    doc.segments.push_back({id, text, {}});
    truth.articles[{doc.provider_id, id}] = articles;
  }
  SweepConfig cfg;
  cfg.thresholds = {0.3, 0.5, 0.7, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
  cfg.min_tokens = 1;
  const auto results = sweep(chunks, {doc}, truth, cfg);

  int mismatches = 0, non_monotone = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double t = results[i].threshold;
    std::map<SegmentKey, std::set<int>> predicted;
    for (const auto& seg : doc.segments) {
      auto& arts = predicted[{doc.provider_id, seg.segment_id}];
      for (const auto& c : chunks) {
        if (ref.distance(seg.text, c.text) <= t) arts.insert(c.article_number);
      }
    }
    const auto tally = pt::confusion_tally(predicted, truth);
    const auto& r = results[i];
    if (r.true_positives != tally.tp || r.false_positives != tally.fp ||
        r.false_negatives != tally.fn) {
      ++mismatches;
    }
    if (i > 0 && r.recall < results[i - 1].recall) ++non_monotone;
  }
  std::ostringstream recalls;
  for (const auto& r : results) {
    recalls << ' ' << fmt("%.2f:%.3f", r.threshold, r.recall);
    if (auto ref_value = reference_correctness(r.threshold)) {
      recalls << fmt("(ref %.2f)", *ref_value);
    }
  }
  return {mismatches == 0 && non_monotone == 0,
          fmt("%zu thresholds, %d tally mismatches, %d recall decreases; threshold:recall",
              results.size(), mismatches, non_monotone) +
              recalls.str()};
}

// 6. Turtle round trip of the bundled GDPR graph.
Outcome turtle_round_trip() {
  const auto doc = parse_regulation(pt::read_file(pt::data_dir() / "gdpr" / "gdpr.reg"));
  const auto obligations =
      load_obligation_map(pt::read_file(pt::data_dir() / "gdpr" / "obligations.csv"), doc);
  const Graph g = populate_regulation(Graph{}, doc, obligations);
  const auto start = Clock::now();
  const std::string once = serialize_turtle(g);
  const Graph back = parse_turtle(once);
  const std::string twice = serialize_turtle(back);
  const double secs = seconds_since(start);
  return {doc.article_count() >= 50 && back == g && once == twice && g.size() <= 10000 &&
              secs < 1.0,
          fmt("%zu articles, %zu triples, sets %s, bytes %s, %.3f s (limit 1 s)",
              doc.article_count(), g.size(), back == g ? "equal" : "DIFFER",
              once == twice ? "identical" : "DIFFER", secs)};
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// 7. ingest + check twice on the mini fixture.
Outcome end_to_end_determinism() {
  const auto start = Clock::now();
  pt::TempDir dir("acceptance");
  const auto mini = [](const char* f) { return (pt::data_dir() / "mini" / f).string(); };
  std::vector<std::string> reports;
  std::vector<std::string> graphs;
  bool codes_ok = true;
  for (int pass = 0; pass < 2; ++pass) {
    const std::string kg = dir.file("kg" + std::to_string(pass) + ".ttl");
    const auto ingest = run_cli({"ingest", "--regulation", mini("regulation.reg"), "--obligations",
                                 mini("obligations.csv"), "--out", kg});
    codes_ok = codes_ok && ingest.code == 0 &&
               ingest.out.find("chapters 3 articles 10") != std::string::npos;
    graphs.push_back(pt::read_file(kg));
    for (const char* format : {"human", "machine"}) {
      const auto check = run_cli({"check", "--regulation", mini("regulation.reg"), "--kg", kg,
                                  "--policies", mini("policies.txt"), "--format", format});
      codes_ok = codes_ok && check.code == cli::kExitGaps;
      reports.push_back(check.out);
    }
    const auto compliant =
        run_cli({"check", "--regulation", mini("regulation.reg"), "--kg", kg, "--policies",
                 mini("policies.txt"), "--provider", "acme-cloud"});
    codes_ok = codes_ok && compliant.code == cli::kExitOk;
    reports.push_back(compliant.out);
  }
  const bool identical = graphs[0] == graphs[1] && reports[0] == reports[3] &&
                         reports[1] == reports[4] && reports[2] == reports[5];
  const double secs = seconds_since(start);
  return {identical && codes_ok && secs < 10.0,
          fmt("outputs %s across runs, exit codes %s (1 overall, 0 for acme-cloud), %.2f s "
              "(limit 10 s)",
              identical ? "byte-identical" : "DIFFER", codes_ok ? "correct" : "WRONG", secs)};
}

// 8. Chunk accounting.
Outcome chunk_accounting() {
  pt::Rng rng(430);
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> paras(1 + pt::pick(rng, 30));
    for (int& p : paras) p = static_cast<int>(pt::pick(rng, 6));
    const std::string src = pt::regulation_source(paras, 1 + pt::pick(rng, 5));
    if (chunk_regulation(parse_regulation(src)).size() == pt::count_raw(src).expected_chunks()) {
      ++agree;
    }
  }
  bool bundled_ok = true;
  std::size_t gdpr_chunks = 0;
  for (const char* file : {"gdpr/gdpr.reg", "mini/regulation.reg"}) {
    const std::string src = pt::read_file(pt::data_dir() / file);
    const std::size_t n = chunk_regulation(parse_regulation(src)).size();
    bundled_ok = bundled_ok && n == pt::count_raw(src).expected_chunks();
    if (gdpr_chunks == 0) gdpr_chunks = n;
  }
  return {agree == 100 && bundled_ok,
          fmt("%d/100 random fixtures and bundled sources match the line counter; bundled GDPR "
              "has %zu chunks (reference figure 430, not asserted)",
              agree, gdpr_chunks)};
}

// 9. A generation service that times out.
Outcome external_resilience() {
  const auto start = Clock::now();
  const auto doc = parse_regulation(pt::read_file(pt::data_dir() / "mini" / "regulation.reg"));
  const auto policies = load_policies(pt::read_file(pt::data_dir() / "mini" / "policies.txt"));
  RetrieverConfig cfg;
  cfg.threshold = 0.6;
  const Index index = build_index(chunk_regulation(doc), cfg);
  ExtractiveBackend extractive;
  ExternalServiceBackend slow("exec:sleep 5", std::chrono::milliseconds(100));
  MapOptions opts;
  opts.max_concurrency = 8;

  bool same_articles = true, no_fabrication = true;
  std::size_t failures = 0, segments = 0;
  for (const auto& p : filter_short_segments(policies, kDefaultMinTokens)) {
    const auto a = map_policy_to_articles(p, index, cfg, extractive, opts).providers.at(p.provider_id);
    const auto b = map_policy_to_articles(p, index, cfg, slow, opts).providers.at(p.provider_id);
    same_articles = same_articles && a.articles == b.articles;
    failures += b.failures.size();
    for (std::size_t i = 0; i < b.segments.size(); ++i) {
      ++segments;
      same_articles = same_articles && a.segments[i].articles == b.segments[i].articles;
      no_fabrication = no_fabrication && b.segments[i].fell_back &&
                       b.segments[i].answer_text == a.segments[i].answer_text;
    }
  }

  pt::TempDir dir("acceptance-ext");
  const auto mini = [](const char* f) { return (pt::data_dir() / "mini" / f).string(); };
  run_cli({"ingest", "--regulation", mini("regulation.reg"), "--obligations",
           mini("obligations.csv"), "--out", dir.file("kg.ttl")});
  const std::vector<std::string> base = {"check", "--regulation", mini("regulation.reg"), "--kg",
                                         dir.file("kg.ttl"), "--policies", mini("policies.txt"),
                                         "--format", "machine"};
  auto external = base;
  external.insert(external.end(), {"--backend", "external", "--external-endpoint", "exec:sleep 5",
                                   "--timeout-ms", "100", "--max-concurrency", "8"});
  const auto plain = run_cli(base);
  const auto degraded = run_cli(external);
  const bool cli_ok = degraded.code == plain.code && degraded.out == plain.out &&
                      degraded.err.find("BackendUnavailable") != std::string::npos;
  const double secs = seconds_since(start);
  return {same_articles && no_fabrication && failures == segments && cli_ok,
          fmt("%zu/%zu segments fell back, supporting articles %s, answers %s, check report %s "
              "with BackendUnavailable notice, %.2f s",
              failures, segments, same_articles ? "identical" : "DIFFER",
              no_fabrication ? "extractive" : "FABRICATED", cli_ok ? "identical" : "DIFFERENT",
              secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"rule-engine oracle equivalence", rule_engine_oracle},
      {"S1/S2 obligation semantics", s1_s2_semantics},
      {"gap query equivalence", gap_equivalence},
      {"retrieval monotonicity and oracle match", retrieval_oracle},
      {"threshold sweep behavior", sweep_behavior},
      {"Turtle round trip", turtle_round_trip},
      {"end-to-end determinism", end_to_end_determinism},
      {"chunk accounting", chunk_accounting},
      {"external-backend resilience", external_resilience},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "AC" << (i + 1) << ' ' << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " acceptance criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
