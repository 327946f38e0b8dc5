#pragma once

// Command implementations behind the ratcert executable. Each returns the
// JSON report, an optional text rendering and the process exit code, so the
// commands can be driven directly from tests.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratcert/field.hpp"
#include "ratcert/ranklab.hpp"
#include "ratcert/rep.hpp"

namespace ratcert::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInconclusive = 2,
  kExitInvalidInput = 3,
  kExitResource = 4,
};

/// Maps an exception escaping a command to its exit code.
int exit_code_for(const std::exception& e);

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::string text;  // human-readable form, empty if the JSON is the output
};

struct SearchArgs {
  int d = 0;
  std::uint64_t kappa = rep::kDefaultKappa;
  std::optional<int> e_min;
  std::optional<int> e_max;
};
CommandResult cmd_search(const SearchArgs& args);

struct CheckDbArgs {
  int d = 0;
  std::optional<int> e;
  std::optional<std::vector<int>> components;
  std::uint64_t kappa = rep::kDefaultKappa;
  std::uint64_t prime = kDefaultPrime;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n_points;
  std::optional<std::size_t> t_terms;
  int max_retries = 3;
  unsigned threads = 1;
};
/// Picks the first search candidate unless e (and optionally the
/// components) are given. Falls back along the prime ladder when the
/// prime divides a chi denominator.
CommandResult cmd_check_db(const CheckDbArgs& args);

struct CheckCovArgs {
  int d = 0;
  std::uint64_t prime = kDefaultPrime;
  std::uint64_t seed = 1;
  std::optional<std::size_t> samples;
  std::size_t g_terms = 20;
  unsigned threads = 1;
};
CommandResult cmd_check_cov(const CheckCovArgs& args);

struct TableArgs {
  int from = 1;
  int to = 60;
  bool verify = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::optional<std::filesystem::path> report_dir;  // verified reports are written here
};
CommandResult cmd_table(const TableArgs& args);

struct ChiArgs {
  int e = 0;
  int f = 0;
  std::vector<int> components;
  std::optional<std::uint64_t> prime;
  std::optional<std::filesystem::path> cache;  // binary table written here (needs prime)
};
CommandResult cmd_chi(const ChiArgs& args);

struct RankArgs {
  std::size_t n = 4096;
  std::uint64_t prime = kDefaultPrime;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t panel_width = 256;
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<std::size_t> stop_after;        // panels, then checkpoint and stop
  std::optional<std::size_t> checkpoint_every;  // panels between checkpoints
  bool resume = false;
};
/// Rank of a seeded random n x n matrix, with optional checkpointing.
CommandResult cmd_rank(const RankArgs& args);

/// The seeded random matrix used by cmd_rank: entry (i, j) is element
/// i * cols + j of the stream (seed, "rank-bench").
DenseMatrixFp bench_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols, const PrimeField& field,
                           unsigned threads = 1);

}  // namespace ratcert::cli
