#include "cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "privcomp/compliance.hpp"
#include "privcomp/error.hpp"
#include "privcomp/evaluation.hpp"
#include "privcomp/external_backend.hpp"
#include "privcomp/policy.hpp"
#include "privcomp/rag.hpp"
#include "privcomp/regulation.hpp"
#include "privcomp/retrieval.hpp"
#include "privcomp/rules.hpp"
#include "privcomp/schema.hpp"
#include "privcomp/turtle.hpp"

namespace privcomp::cli {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

constexpr double kDefaultThreshold = 0.6;
constexpr int kDefaultTimeoutMs = 5000;
const std::vector<double> kDefaultSweep = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
                                           1.0, 1.1, 1.2, 1.3, 1.4, 1.5};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << data;
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

// Prefixes parse errors with the file they came from.
template <typename F>
auto with_file(const std::string& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path + ": " + e.what(), e.line());
  }
}

std::set<ObligationRole> parse_roles(const std::string& text) {
  std::set<ObligationRole> roles;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto role = parse_role(item);
    if (!role) throw Error(ErrorCode::UnknownRole, "unknown obligation role '" + item + "'");
    roles.insert(*role);
  }
  return roles;
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad threshold '" + item + "'");
    }
  }
  return out;
}

RuleSet load_rules(const std::string& roles, const std::string& rules_path) {
  RuleSet rules = builtin_rules(parse_roles(roles));
  if (!rules_path.empty()) {
    rules.append(with_file(rules_path, [](const std::string& s) { return parse_rules(s); }));
  }
  return rules;
}

ReportFormat parse_format(const std::string& f) {
  return f == "machine" ? ReportFormat::Machine : ReportFormat::Human;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------

struct IngestOptions {
  std::string regulation;
  std::string obligations;
  std::string out;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  const auto doc =
      with_file(o.regulation, [](const std::string& s) { return parse_regulation(s); });
  const auto obligations = with_file(
      o.obligations, [&](const std::string& s) { return load_obligation_map(s, doc); });
  const auto chunks = chunk_regulation(doc);
  const Graph graph = populate_regulation(Graph{}, doc, obligations);
  const std::string turtle = serialize_turtle(graph);

  std::ostringstream summary;
  summary << "regulation " << doc.regulation_id << " chapters " << doc.chapters.size()
          << " articles " << doc.article_count() << " chunks " << chunks.size()
          << " obligations " << obligations.size() << " triples " << graph.size() << '\n';
  if (o.out.empty()) {
    out << turtle;
    err << summary.str();
  } else {
    write_file(o.out, turtle);
    out << summary.str();
  }
  return kExitOk;
}

struct CheckOptions {
  std::string regulation;
  std::string kg;
  std::string policies;
  std::string rules;
  std::string roles = "Provider,Common";
  double threshold = kDefaultThreshold;
  std::size_t min_tokens = kDefaultMinTokens;
  std::string backend = "extractive";
  std::string endpoint;
  int timeout_ms = kDefaultTimeoutMs;
  std::size_t max_concurrency = 1;
  std::string format = "human";
  std::string provider;
  std::string out;
  std::string kg_out;
};

std::unique_ptr<GeneratorBackend> make_backend(const CheckOptions& o) {
  if (o.backend == "extractive") return std::make_unique<ExtractiveBackend>();
  std::string endpoint = o.endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv(std::string(kEndpointEnvVar).c_str())) endpoint = env;
  }
  if (endpoint.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--backend external needs --external-endpoint or " +
                                                std::string(kEndpointEnvVar));
  }
  return std::make_unique<ExternalServiceBackend>(endpoint,
                                                  std::chrono::milliseconds(o.timeout_ms));
}

int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "--threshold must be > 0");
  const std::string regulation_text = read_file(o.regulation);
  const std::string kg_text = read_file(o.kg);
  const std::string policy_text = read_file(o.policies);
  const std::string rules_text = o.rules.empty() ? std::string() : read_file(o.rules);

  const auto doc = with_file(o.regulation, [](const std::string& s) { return parse_regulation(s); });
  Graph graph = with_file(o.kg, [](const std::string& s) { return parse_turtle(s); });
  const auto all_policies =
      with_file(o.policies, [](const std::string& s) { return load_policies(s); });
  const RuleSet rules = load_rules(o.roles, o.rules);

  std::vector<PolicyDocument> selected;
  for (const auto& p : all_policies) {
    if (o.provider.empty() || p.provider_id == o.provider) selected.push_back(p);
  }
  if (selected.empty()) {
    throw Error(ErrorCode::UnknownProvider, "provider '" + o.provider + "' not in the corpus");
  }
  const auto filtered = filter_short_segments(selected, o.min_tokens);

  RetrieverConfig config;
  config.threshold = o.threshold;
  const Index index = build_index(chunk_regulation(doc), config);
  auto backend = make_backend(o);
  MapOptions map_options;
  map_options.max_concurrency = o.max_concurrency;

  for (const auto& policy : selected) {
    auto it = std::find_if(filtered.begin(), filtered.end(), [&](const PolicyDocument& d) {
      return d.provider_id == policy.provider_id;
    });
    // A policy whose segments were all filtered maps as empty, which raises
    // UpstreamEmptyPolicy.
    const PolicyDocument empty{policy.provider_id, policy.provider_name, {}};
    const PolicyDocument& input = it == filtered.end() ? empty : *it;
    const auto mapping = map_policy_to_articles(input, index, config, *backend, map_options);
    const auto& provider = mapping.providers.at(policy.provider_id);
    for (const auto& failure : provider.failures) {
      err << "notice: BackendUnavailable for " << failure.provider_id << '/' << failure.segment_id
          << ": " << failure.message << "; answered with the extractive fallback\n";
    }
    graph = populate_provider(std::move(graph), policy.provider_id, doc.regulation_id);
    graph = record_compliance(std::move(graph), policy.provider_id, provider.articles);
  }
  graph = infer_fixpoint(std::move(graph), rules);

  std::uint64_t digest = fnv1a64(regulation_text);
  digest = fnv1a64(kg_text, digest);
  digest = fnv1a64(policy_text, digest);
  digest = fnv1a64(rules_text, digest);
  std::ostringstream config_text;
  config_text << o.threshold << '|' << o.min_tokens << '|' << o.roles << '|' << o.provider;
  digest = fnv1a64(config_text.str(), digest);

  const ArticleTitles titles = article_titles(doc);
  const ReportFormat format = parse_format(o.format);
  std::ostringstream reports;
  reports << "# inputs fnv1a64:" << hex64(digest) << '\n';
  bool any_gap = false;
  for (const auto& policy : selected) {
    const auto report = compute_gap(graph, policy.provider_id, &titles);
    any_gap = any_gap || !report.fully_compliant();
    if (format == ReportFormat::Human) reports << '\n';
    reports << render_report(report, format);
  }
  emit(o.out, reports.str(), out);
  if (!o.kg_out.empty()) write_file(o.kg_out, serialize_turtle(graph));
  return any_gap ? kExitGaps : kExitOk;
}

struct GapsOptions {
  std::string provider;
  std::string kg;
  std::string regulation;
  std::string rules;
  std::string roles = "Provider,Common";
  std::string format = "human";
  std::string out;
};

int cmd_gaps(const GapsOptions& o, std::ostream& out, std::ostream&) {
  Graph graph = with_file(o.kg, [](const std::string& s) { return parse_turtle(s); });
  graph = infer_fixpoint(std::move(graph), load_rules(o.roles, o.rules));
  std::optional<ArticleTitles> titles;
  if (!o.regulation.empty()) {
    titles = article_titles(
        with_file(o.regulation, [](const std::string& s) { return parse_regulation(s); }));
  }
  const auto report = compute_gap(graph, o.provider, titles ? &*titles : nullptr);
  emit(o.out, render_report(report, parse_format(o.format)), out);
  return report.fully_compliant() ? kExitOk : kExitGaps;
}

struct SweepOptions {
  std::string regulation;
  std::string policies;
  std::string truth;
  std::string thresholds;
  std::size_t min_tokens = kDefaultMinTokens;
  std::string out;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream&) {
  const auto doc = with_file(o.regulation, [](const std::string& s) { return parse_regulation(s); });
  const auto policies =
      with_file(o.policies, [](const std::string& s) { return load_policies(s); });
  const auto truth =
      with_file(o.truth, [&](const std::string& s) { return load_ground_truth(s, policies); });
  SweepConfig config;
  config.thresholds = o.thresholds.empty() ? kDefaultSweep : parse_thresholds(o.thresholds);
  config.min_tokens = o.min_tokens;
  const auto chunks = chunk_regulation(doc);
  const auto results = sweep(chunks, policies, truth, config);
  std::ostringstream text;
  text << "# regulation " << doc.regulation_id << " chunks " << chunks.size() << " min_tokens "
       << o.min_tokens << '\n';
  text << render_sweep_table(results);
  emit(o.out, text.str(), out);
  return kExitOk;
}

struct DumpOptions {
  std::string regulation;
  std::string out;
};

int cmd_dump_index(const DumpOptions& o, std::ostream& out, std::ostream&) {
  const auto doc = with_file(o.regulation, [](const std::string& s) { return parse_regulation(s); });
  const Index index = build_index(chunk_regulation(doc), RetrieverConfig{});
  emit(o.out, index.dump(), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy-policy compliance checking against a regulation knowledge graph",
               "privcomp"};
  app.require_subcommand(1);
  const std::vector<std::string> formats = {"human", "machine"};

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build the regulation knowledge graph");
  ingest_cmd->add_option("--regulation", ingest.regulation, "Regulation source file")->required();
  ingest_cmd->add_option("--obligations", ingest.obligations, "Obligation map file")->required();
  ingest_cmd->add_option("--out", ingest.out, "Turtle output (default: stdout)");

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Map policies, infer obligations, report gaps");
  check_cmd->add_option("--regulation", check.regulation, "Regulation source file")->required();
  check_cmd->add_option("--kg", check.kg, "Knowledge graph from `ingest`")->required();
  check_cmd->add_option("--policies", check.policies, "Policy corpus file")->required();
  check_cmd->add_option("--rules", check.rules, "Extra rule file");
  check_cmd->add_option("--roles", check.roles, "Obligation roles for the built-in rules");
  check_cmd->add_option("--threshold", check.threshold, "Maximum retrieval distance");
  check_cmd->add_option("--min-tokens", check.min_tokens, "Drop shorter policy segments")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--backend", check.backend, "Answer generator")
      ->check(CLI::IsMember({"extractive", "external"}));
  check_cmd->add_option("--external-endpoint", check.endpoint,
                        "exec:<command> or unix:<path> (env " + std::string(kEndpointEnvVar) + ")");
  check_cmd->add_option("--timeout-ms", check.timeout_ms, "External backend timeout")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-concurrency", check.max_concurrency, "Concurrent backend calls")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--format", check.format, "Report format")->check(CLI::IsMember(formats));
  check_cmd->add_option("--provider", check.provider, "Only check this provider");
  check_cmd->add_option("--out", check.out, "Report output (default: stdout)");
  check_cmd->add_option("--kg-out", check.kg_out, "Write the updated knowledge graph");

  GapsOptions gaps;
  auto* gaps_cmd = app.add_subcommand("gaps", "Report required-but-missing articles");
  gaps_cmd->add_option("--provider", gaps.provider, "Provider id")->required();
  gaps_cmd->add_option("--kg", gaps.kg, "Knowledge graph with recorded compliance")->required();
  gaps_cmd->add_option("--regulation", gaps.regulation, "Regulation source for article titles");
  gaps_cmd->add_option("--rules", gaps.rules, "Extra rule file");
  gaps_cmd->add_option("--roles", gaps.roles, "Obligation roles for the built-in rules");
  gaps_cmd->add_option("--format", gaps.format, "Report format")->check(CLI::IsMember(formats));
  gaps_cmd->add_option("--out", gaps.out, "Report output (default: stdout)");

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Score retrieval against ground truth");
  sweep_cmd->add_option("--regulation", sweep_opts.regulation, "Regulation source")->required();
  sweep_cmd->add_option("--policies", sweep_opts.policies, "Policy corpus file")->required();
  sweep_cmd->add_option("--truth", sweep_opts.truth, "Ground-truth file")->required();
  sweep_cmd->add_option("--thresholds", sweep_opts.thresholds, "Comma-separated thresholds");
  sweep_cmd->add_option("--min-tokens", sweep_opts.min_tokens, "Drop shorter policy segments")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_opts.out, "Table output (default: stdout)");

  DumpOptions dump;
  auto* dump_cmd = app.add_subcommand("dump-index", "Print the chunk vectors (debugging aid)");
  dump_cmd->add_option("--regulation", dump.regulation, "Regulation source")->required();
  dump_cmd->add_option("--out", dump.out, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest, out, err);
    if (*check_cmd) return cmd_check(check, out, err);
    if (*gaps_cmd) return cmd_gaps(gaps, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, out, err);
    if (*dump_cmd) return cmd_dump_index(dump, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace privcomp::cli
