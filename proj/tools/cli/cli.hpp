#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace privcomp::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitGaps = 1;
inline constexpr int kExitError = 2;

/// Runs `privcomp <args...>` (args exclude the program name).
///
///   ingest  --regulation F --obligations F [--out KG]
///   check   --regulation F --kg KG --policies F [--rules F] [--roles R,..]
///           [--threshold T] [--min-tokens N] [--backend extractive|external]
///           [--external-endpoint E] [--timeout-ms MS] [--format human|machine]
///           [--provider ID] [--out F] [--kg-out KG]
///   gaps    --provider ID --kg KG [--regulation F] [--rules F] [--roles R,..]
///           [--format human|machine] [--out F]
///   sweep   --regulation F --policies F --truth F [--thresholds a,b,..]
///           [--min-tokens N] [--out F]
///   dump-index --regulation F [--out F]
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit, used to stamp reports with their inputs instead of a time.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace privcomp::cli
