#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "privcomp/compliance.hpp"
#include "privcomp/retrieval.hpp"
#include "privcomp/rules.hpp"
#include "privcomp/schema.hpp"
#include "privcomp/turtle.hpp"

namespace {

using namespace privcomp;

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(PRIVCOMP_DATA_DIR) + "/" + rel, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const RegulationDoc& gdpr() {
  static const RegulationDoc doc = parse_regulation(slurp("gdpr/gdpr.reg"));
  return doc;
}

const Graph& gdpr_graph() {
  static const Graph g =
      populate_regulation(Graph{}, gdpr(), load_obligation_map(slurp("gdpr/obligations.csv"), gdpr()));
  return g;
}

void BM_ParseRegulation(benchmark::State& state) {
  const std::string src = slurp("gdpr/gdpr.reg");
  for (auto _ : state) benchmark::DoNotOptimize(parse_regulation(src));
}
BENCHMARK(BM_ParseRegulation);

void BM_BuildIndex(benchmark::State& state) {
  const auto chunks = chunk_regulation(gdpr());
  for (auto _ : state) benchmark::DoNotOptimize(build_index(chunks, RetrieverConfig{}));
  state.counters["chunks"] = static_cast<double>(chunks.size());
}
BENCHMARK(BM_BuildIndex)->Unit(benchmark::kMillisecond);

void BM_Retrieve(benchmark::State& state) {
  const Index index = build_index(chunk_regulation(gdpr()), RetrieverConfig{});
  RetrieverConfig cfg;
  cfg.threshold = static_cast<double>(state.range(0)) / 10.0;
  const std::string query =
      "We notify the supervisory authority of any personal data breach within 72 hours and "
      "apply encryption and pseudonymisation to stored data.";
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(index, query, cfg));
}
BENCHMARK(BM_Retrieve)->Arg(6)->Arg(10)->Arg(15);

void BM_InferFixpoint(benchmark::State& state) {
  Graph g = gdpr_graph();
  for (int p = 0; p < state.range(0); ++p) {
    const std::string id = "provider" + std::to_string(p) + ".example";
    g = populate_provider(std::move(g), id, "GDPR");
    g = record_compliance(std::move(g), id, {5, 6, 13, 32});
  }
  const RuleSet rules = builtin_rules();
  for (auto _ : state) benchmark::DoNotOptimize(infer_fixpoint(g, rules));
  state.counters["triples"] = static_cast<double>(g.size());
}
BENCHMARK(BM_InferFixpoint)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TurtleSerialize(benchmark::State& state) {
  const Graph& g = gdpr_graph();
  for (auto _ : state) benchmark::DoNotOptimize(serialize_turtle(g));
}
BENCHMARK(BM_TurtleSerialize);

void BM_TurtleParse(benchmark::State& state) {
  const std::string ttl = serialize_turtle(gdpr_graph());
  for (auto _ : state) benchmark::DoNotOptimize(parse_turtle(ttl));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * ttl.size()));
}
BENCHMARK(BM_TurtleParse);

}  // namespace

BENCHMARK_MAIN();
