#include "ratcert/cli.hpp"

#include <fstream>
#include <new>

#include <spdlog/spdlog.h>

#include "ratcert/chi_table.hpp"
#include "ratcert/covariants.hpp"
#include "ratcert/errors.hpp"
#include "ratcert/genericity.hpp"
#include "ratcert/known_results.hpp"
#include "ratcert/projops.hpp"
#include "ratcert/sampling.hpp"

namespace ratcert::cli {
namespace {

int status_exit(Status s) { return s == Status::Pass ? kExitOk : kExitInconclusive; }

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

// Primes from the ladder starting at `preferred` (or preferred alone if it
// is not on the ladder).
std::vector<std::uint64_t> prime_sequence(std::uint64_t preferred) {
  std::vector<std::uint64_t> out{preferred};
  bool after = false;
  for (auto p : kPrimeLadder) {
    if (after) out.push_back(p);
    if (p == preferred) after = true;
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e) || dynamic_cast<const std::bad_alloc*>(&e)) return kExitResource;
  if (dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const BadPrime*>(&e) ||
      dynamic_cast<const CorruptCheckpoint*>(&e)) {
    return kExitInvalidInput;
  }
  return kExitInternal;
}

CommandResult cmd_search(const SearchArgs& args) {
  if (args.d < 1) throw InvalidInput("d must be positive");
  std::optional<rep::ERange> range;
  if (args.e_min || args.e_max) {
    range = rep::ERange{args.e_min.value_or(1), args.e_max.value_or(rep::default_e_max(args.d, args.kappa))};
  }
  const auto cands = rep::search_candidates(args.d, args.kappa, range);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : cands) list.push_back(rep::to_json(c));
  spdlog::info("stage=search d={} kappa={} candidates={}", args.d, args.kappa, cands.size());
  return {kExitOk, list, {}};
}

CommandResult cmd_check_db(const CheckDbArgs& args) {
  if (args.d < 1) throw InvalidInput("d must be positive");
  if (args.components && !args.e) throw InvalidInput("--components needs --e");

  rep::Candidate cand;
  if (args.e && args.components) {
    cand = rep::make_candidate(args.d, *args.e, *args.components, args.kappa);
    const auto problems = rep::validate(cand);
    if (!problems.empty()) throw InvalidInput("invalid candidate: " + problems.front());
  } else {
    std::optional<rep::ERange> range;
    if (args.e) range = rep::ERange{*args.e, *args.e};
    const auto cands = rep::search_candidates(args.d, args.kappa, range);
    if (cands.empty()) {
      spdlog::warn("stage=search d={} kappa={} no candidate", args.d, args.kappa);
      return {kExitInconclusive,
              {{"d", args.d}, {"kappa", args.kappa}, {"status", "NO_CANDIDATE"}, {"candidates", nlohmann::json::array()}},
              {}};
    }
    cand = cands.front();
  }

  GenericityInstance inst;
  inst.candidate = cand;
  inst.seed = args.seed;
  inst.n_points = args.n_points;
  inst.t_terms = args.t_terms;
  inst.max_retries = args.max_retries;
  inst.threads = args.threads;
  for (std::uint64_t p : prime_sequence(args.prime)) {
    inst.prime = p;
    try {
      const Verdict v = run_check(inst);
      return {status_exit(v.status), to_json(v), {}};
    } catch (const BadPrime& e) {
      spdlog::warn("stage=prime p={} rejected: {}", p, e.what());
    }
  }
  throw BadPrime("no admissible prime on the ladder");
}

CommandResult cmd_check_cov(const CheckCovArgs& args) {
  cov::SpanOptions opts;
  opts.d = args.d;
  opts.prime = args.prime;
  opts.seed = args.seed;
  opts.samples = args.samples;
  opts.g_terms = args.g_terms;
  opts.threads = args.threads;
  const auto rep = cov::span_check(opts);
  return {status_exit(rep.status), to_json(rep), {}};
}

CommandResult cmd_table(const TableArgs& args) {
  auto rows = table_rows(args.from, args.to);
  int exit = kExitOk;
  nlohmann::json verified = nlohmann::json::array();
  if (args.verify) {
    if (args.report_dir) std::filesystem::create_directories(*args.report_dir);
    for (auto& row : rows) {
      if (!row.live_verifiable()) continue;
      CommandResult r;
      if (*row.method == "double-bundle") {
        CheckDbArgs db;
        db.d = row.d;
        db.seed = args.seed;
        db.threads = args.threads;
        r = cmd_check_db(db);
      } else {
        CheckCovArgs cv;
        cv.d = row.d;
        cv.seed = args.seed;
        cv.threads = args.threads;
        r = cmd_check_cov(cv);
      }
      if (r.exit_code != kExitOk) exit = kExitInconclusive;
      if (args.report_dir && r.exit_code == kExitOk) {
        const auto path = *args.report_dir / ("d" + std::to_string(row.d) + ".json");
        write_json(path, r.report);
        row.certificate = path.string();
      }
      verified.push_back({{"d", row.d}, {"method", *row.method}, {"report", r.report}});
    }
  }
  nlohmann::json j = {{"from", args.from}, {"to", args.to}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  j["unknown"] = unknown_degrees(rows);
  if (args.verify) j["verified"] = verified;
  return {exit, j, render_table(rows)};
}

CommandResult cmd_chi(const ChiArgs& args) {
  const ChiPoly chi = chi_poly(args.e, args.f, args.components);
  nlohmann::json j = to_json(chi);
  if (args.prime) {
    const PrimeField field(*args.prime);
    const ChiTable table = reduce_chi(chi, field);
    j["prime"] = *args.prime;
    j["lead"] = table.lead;
    if (args.cache) {
      write_chi_table(table, *args.cache);
      j["cache"] = args.cache->string();
    }
  } else if (args.cache) {
    throw InvalidInput("--cache needs --prime");
  }
  return {kExitOk, j, {}};
}

DenseMatrixFp bench_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols, const PrimeField& field,
                           unsigned threads) {
  const SampleStream stream(seed, "rank-bench");
  return fill_rows(
      field, rows, cols,
      [&](std::size_t i, std::span<Elem> row) {
        for (std::size_t j = 0; j < cols; ++j) row[j] = stream.element(i * cols + j, field);
      },
      threads);
}

CommandResult cmd_rank(const RankArgs& args) {
  if (args.n == 0) throw InvalidInput("n must be positive");
  const PrimeField field(args.prime);
  const EliminationOptions opts{.panel_width = args.panel_width, .threads = args.threads};
  if ((args.stop_after || args.resume || args.checkpoint_every) && !args.checkpoint_dir) {
    throw InvalidInput("checkpointing needs a checkpoint directory");
  }
  std::optional<std::filesystem::path> ckpt;
  if (args.checkpoint_dir) {
    std::filesystem::create_directories(*args.checkpoint_dir);
    ckpt = *args.checkpoint_dir /
           ("rank-n" + std::to_string(args.n) + "-s" + std::to_string(args.seed) + "-p" + std::to_string(args.prime) +
            "-w" + std::to_string(args.panel_width) + ".crkp");
  }

  std::optional<Eliminator> elim;
  if (args.resume) {
    elim.emplace(Eliminator::resume(*ckpt, opts));
    spdlog::info("stage=resume path={} panels={} rank={}", ckpt->string(), elim->panels_done(), elim->rank_so_far());
  } else {
    elim.emplace(bench_matrix(args.seed, args.n, args.n, field, args.threads), opts);
  }
  while (!elim->done()) {
    if (args.stop_after && elim->panels_done() >= *args.stop_after) {
      elim->write_checkpoint(*ckpt);
      spdlog::info("stage=checkpoint path={} panels={} rank={}", ckpt->string(), elim->panels_done(),
                   elim->rank_so_far());
      nlohmann::json j = {{"status", "STOPPED"},
                          {"panels", elim->panels_done()},
                          {"rankSoFar", elim->rank_so_far()},
                          {"checkpointId", ckpt->string()}};
      return {kExitOk, j, {}};
    }
    elim->step();
    if (args.checkpoint_every && *args.checkpoint_every > 0 && !elim->done() &&
        elim->panels_done() % *args.checkpoint_every == 0) {
      elim->write_checkpoint(*ckpt);
      spdlog::info("stage=checkpoint path={} panels={} rank={}", ckpt->string(), elim->panels_done(),
                   elim->rank_so_far());
    }
  }
  RankReport r = elim->report();
  if (ckpt) r.checkpoint_id = ckpt->string();
  spdlog::info("stage=rank n={} threads={} rank={} seconds={:.3f}", args.n, args.threads, r.rank, r.elapsed_seconds);
  nlohmann::json j = {{"status", "DONE"},   {"rank", r.rank},   {"rows", r.rows},
                      {"cols", r.cols},     {"p", r.p},         {"elapsedSeconds", r.elapsed_seconds},
                      {"panels", r.panels}, {"resumed", elim->resumed()}};
  j["checkpointId"] = r.checkpoint_id ? nlohmann::json(*r.checkpoint_id) : nlohmann::json(nullptr);
  return {kExitOk, j, {}};
}

}  // namespace ratcert::cli
