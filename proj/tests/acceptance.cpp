// Acceptance driver: one PASS/FAIL line per criterion. `--only N` runs a
// single criterion; the exit code is nonzero if any criterion that ran failed.

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "ratcert/biform.hpp"
#include "ratcert/chi_table.hpp"
#include "ratcert/cli.hpp"
#include "ratcert/covariants.hpp"
#include "ratcert/errors.hpp"
#include "ratcert/known_results.hpp"
#include "ratcert/projops.hpp"
#include "ratcert/ranklab.hpp"
#include "ratcert/rep.hpp"
#include "ratcert/sampling.hpp"

using namespace ratcert;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// --- AC1 / AC2 ----------------------------------------------------------------

Outcome ac1() {
  struct Row {
    int a, b;
    std::uint64_t dim;
  };
  const std::vector<Row> rows{{0, 27, 406}, {11, 2, 270}, {15, 0, 136}, {2, 14, 405}, {0, 54, 1540},
                              {11, 8, 1134}, {6, 3, 154},  {5, 2, 81},   {3, 0, 10},   {0, 51, 1378}};
  const auto start = Clock::now();
  std::vector<std::uint64_t> got;
  for (const auto& r : rows) got.push_back(rep::dim_irrep({r.a, r.b}));
  const double ms = seconds_since(start) * 1e3;
  std::string bad;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (got[i] != rows[i].dim) bad += fmt::format(" V({},{})={}!={}", rows[i].a, rows[i].b, got[i], rows[i].dim);
  }
  return {bad.empty() && ms < 1.0, fmt::format("10 dimensions, {:.4f} ms{}", ms, bad)};
}

Outcome ac2() {
  const rep::RepSum u{{{{11, 8}, 1}, {{6, 3}, 1}, {{5, 2}, 1}, {{3, 0}, 1}}};
  const rep::RepSum v{{{{0, 54}, 1}}};
  const rep::RepSum w{{{{0, 51}, 1}}};
  const auto chk = rep::check_dimensions(u, v, w, rep::kDefaultKappa);
  const bool ok = chk.dim_u == 1379 && chk.dim_w == 1378 && chk.dim_v == 1540 && chk.holds();
  return {ok, fmt::format("dimU={} = dimW+1={} ; dimV-dimU={} > {}", chk.dim_u, chk.dim_w + 1,
                          chk.dim_v - chk.dim_u, chk.kappa)};
}

// --- AC3 - AC5 ----------------------------------------------------------------

Outcome ac3() {
  bool ok = true;
  std::string detail;
  for (int d = 30; d <= 45; d += 3) {
    cli::CheckDbArgs args;
    args.d = d;
    args.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto start = Clock::now();
    const auto r = cli::cmd_check_db(args);
    const double secs = seconds_since(start);
    const auto& j = r.report;
    if (!j.contains("e")) return {false, fmt::format("d={}: {}", d, j.dump())};
    const auto dim_w = rep::make_candidate(d, j["e"], j["components"], rep::kDefaultKappa).dim_w;
    const bool pass = r.exit_code == 0 && j.value("status", "") == "PASS" && j["rankA"] == dim_w &&
                      j["rankN"] == j["rankA"] && j["kernelDim"] == 1 && j["zeroCheck"] == true &&
                      j["retries"].get<int>() <= 3 && j["prime"] == kDefaultPrime && secs < 600.0;
    ok &= pass;
    detail += fmt::format(" d={}:{}(e={},rank={},retries={},{:.1f}s)", d, pass ? "ok" : "bad", j.value("e", -1),
                          j.value("rankA", 0), j.value("retries", -1), secs);
  }
  return {ok, detail.substr(1)};
}

Outcome span_series(std::initializer_list<int> degrees, std::size_t rank, double limit_seconds) {
  bool ok = true;
  std::string detail;
  for (int d : degrees) {
    cli::CheckCovArgs args;
    args.d = d;
    args.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto start = Clock::now();
    const auto r = cli::cmd_check_cov(args);
    const double secs = seconds_since(start);
    const auto& j = r.report;
    const bool pass = r.exit_code == 0 && j["status"] == "PASS" && j["rank"] == rank &&
                      j["escalations"].get<int>() <= 2 && secs < limit_seconds;
    ok &= pass;
    detail += fmt::format(" d={}:{}(rank={},esc={},{:.2f}s)", d, pass ? "ok" : "bad", j["rank"].get<std::size_t>(),
                          j["escalations"].get<int>(), secs);
  }
  return {ok, detail.substr(1)};
}

Outcome ac4() { return span_series({19, 22, 28, 31, 34}, 15, 300.0); }
Outcome ac5() { return span_series({35, 38, 41}, 45, 900.0); }

// --- AC6 ------------------------------------------------------------------------

Outcome ac6() {
  const PrimeField field(kDefaultPrime);
  std::mt19937_64 rng(6);
  auto draw = [&] { return static_cast<long>(rng() % 201) - 100; };
  std::size_t cases = 0, mismatches = 0;
  for (int e = 0; e <= 4; ++e) {
    for (int f = e; e + f <= 8; ++f) {
      struct Input {
        QVec3 u, v, p, q;
        std::vector<Elem> per_component;  // symbolic value of each summand, mod p
      };
      std::vector<Input> inputs(100);
      for (auto& in : inputs) {
        for (auto* x : {&in.u, &in.v, &in.p, &in.q}) *x = {Rational(draw()), Rational(draw()), Rational(draw())};
        const BiForm t = BiForm::pure_power(in.u, e, in.v, f);
        for (int i = 0; i <= e; ++i) {
          const Rational val = apply_projector(projector_coeffs(e, f, i), t).evaluate(in.p, in.q);
          in.per_component.push_back(reduce_rational(val, field));
        }
      }
      auto to_vec = [&](const QVec3& x) {
        Vec3 out{};
        for (std::size_t r = 0; r < 3; ++r) out[r] = reduce_rational(x[r], field);
        return out;
      };
      for (unsigned mask = 1; mask < (1u << (e + 1)); ++mask) {
        std::vector<int> comps;
        for (int i = 0; i <= e; ++i) {
          if (mask >> i & 1) comps.push_back(i);
        }
        const ChiTable table = reduce_chi(chi_poly(e, f, comps), field);
        for (const auto& in : inputs) {
          Elem expect = 0;
          for (int i : comps) expect = field.add(expect, in.per_component[static_cast<std::size_t>(i)]);
          const Elem got = eval_psi(to_vec(in.u), to_vec(in.v), {to_vec(in.p), to_vec(in.q)}, table, field);
          mismatches += got != expect;
        }
        ++cases;
      }
    }
  }
  return {mismatches == 0, fmt::format("{} (e,f,I) cases x 100 inputs, {} mismatches", cases, mismatches)};
}

// --- AC7 ------------------------------------------------------------------------

std::size_t naive_rank(std::vector<std::vector<std::uint64_t>> a, std::uint64_t p) {
  auto power = [p](std::uint64_t b, std::uint64_t k) {
    std::uint64_t r = 1;
    for (b %= p; k; k >>= 1, b = b * b % p) {
      if (k & 1) r = r * b % p;
    }
    return r;
  };
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    const std::uint64_t inv = power(a[rank][c], p - 2);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const std::uint64_t factor = a[r][c] * inv % p;
      for (std::size_t k = c; k < cols; ++k) a[r][k] = (a[r][k] + (p - factor) * a[rank][k]) % p;
    }
    ++rank;
  }
  return rank;
}

Outcome ac7() {
  std::mt19937_64 rng(7);
  const std::vector<std::uint64_t> primes{3, 5, 101, 65521, kDefaultPrime};
  std::size_t rank_bad = 0, null_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t p = primes[static_cast<std::size_t>(trial) % primes.size()];
    const PrimeField field(p);
    const std::size_t rows = 1 + rng() % 64, cols = 1 + rng() % 64;
    // low-rank products exercise rank deficiency as well as full rank
    const std::size_t inner = 1 + rng() % 64;
    DenseMatrixFp x(field, rows, inner), y(field, inner, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t k = 0; k < inner; ++k) x.at(i, k) = static_cast<Elem>(rng() % field.modulus());
    }
    for (std::size_t k = 0; k < inner; ++k) {
      for (std::size_t j = 0; j < cols; ++j) y.at(k, j) = static_cast<Elem>(rng() % field.modulus());
    }
    const DenseMatrixFp m = multiply(x, y);
    std::vector<std::vector<std::uint64_t>> dense(rows, std::vector<std::uint64_t>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) dense[i][j] = m.at(i, j);
    }
    const std::size_t expect = naive_rank(dense, field.modulus());
    const std::size_t panel = 1 + rng() % 40;
    const auto r = rank_fp(m, {.panel_width = panel, .threads = 1 + static_cast<unsigned>(rng() % 3)});
    rank_bad += r.rank != expect;

    const auto basis = nullspace_fp(m, {.panel_width = panel});
    null_bad += basis.size() != cols - expect;
    for (const auto& v : basis) {
      for (std::size_t i = 0; i < rows; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < cols; ++j) acc = (acc + std::uint64_t{m.at(i, j)} * v[j]) % field.modulus();
        null_bad += acc != 0;
      }
    }
  }
  return {rank_bad == 0 && null_bad == 0,
          fmt::format("200 matrices, {} rank mismatches, {} nullspace failures", rank_bad, null_bad)};
}

// --- AC8 / AC9 ------------------------------------------------------------------

Outcome ac8() {
  const PrimeField field(kDefaultPrime);
  std::size_t bad = 0, exact_bad = 0;
  std::string detail;
  for (int d : {19, 22, 25, 37}) {
    const auto cs = cov::covariant_case(d);
    const int k = cs.k_nodes;
    for (int trial = 0; trial < 100; ++trial) {
      SampleCursor cur(SampleStream(static_cast<std::uint64_t>(trial), "ac8/" + std::to_string(k)), field);
      const auto data = cov::draw_interpolation(cur, field, k);
      bad += !cov::divisible_by_x1_power(cov::expand(cov::build_fc(data, d)), k);
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<long> pool;
      for (long v = -60; v <= 60; ++v) pool.push_back(v);
      std::shuffle(pool.begin(), pool.end(), rng);
      cov::InterpolationData<Rational> data;
      for (int i = 0; i < k; ++i) data.b.emplace_back(pool[static_cast<std::size_t>(i)]);
      data.c = pool[static_cast<std::size_t>(k)];
      data.lambda = static_cast<long>(rng() % 7) + 1;
      data.mu = static_cast<long>(rng() % 7) - 3;
      exact_bad += !cov::divisible_by_x1_power(cov::expand(cov::build_fc(data, d)), k);
    }
    detail += fmt::format(" K={}(d={})", k, d);
  }
  return {bad == 0 && exact_bad == 0,
          fmt::format("100 mod p + 3 over Q per K,{}; {} failures mod p, {} over Q", detail, bad, exact_bad)};
}

Outcome ac9() {
  // n = 2, w = 1 (degree 7). The fiber formula needs K > 2n + w and d > K,
  // which leaves K = 6.
  const int n = 2, w = 1, d = 7, k = 6;
  std::mt19937_64 rng(9);
  auto small = [&] { return Rational(static_cast<long>(rng() % 11) - 5); };
  std::optional<Rational> scalar;
  std::size_t mismatches = 0;
  bool unit_is_scalar = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<long> pool;
    for (long v = -20; v <= 20; ++v) pool.push_back(v);
    std::shuffle(pool.begin(), pool.end(), rng);
    cov::InterpolationData<Rational> data;
    for (int i = 0; i < k; ++i) data.b.emplace_back(pool[static_cast<std::size_t>(i)]);
    data.c = pool[static_cast<std::size_t>(k)];
    data.lambda = small();
    data.mu = small();
    if (data.lambda == 0 && data.mu == 0) data.mu = 1;
    cov::PowerSumForm<Rational> g{d, {}};
    for (int t = 0; t < 4; ++t) {
      Rational a = small();
      if (a == 0) a = 1;
      cov::LinForm<Rational> l{small(), small(), small()};
      if (l[0] == 0 && l[1] == 0 && l[2] == 0) l[2] = 1;
      g.terms.push_back({a, l});
    }
    auto combined = cov::build_fc(data, d);
    combined.terms.insert(combined.terms.end(), g.terms.begin(), g.terms.end());
    const auto full = cov::cov_quad(combined, n, w);
    const auto split = cov::eval_cov_fiber(data, g, n, w);
    const auto unit = cov::eval_cov_fiber(data, g, n, w, 1);

    auto ratio_of = [](const cov::TernaryForm<Rational>& num, const cov::TernaryForm<Rational>& den)
        -> std::optional<Rational> {
      std::optional<Rational> r;
      for (std::size_t m = 0; m < den.coeffs.size(); ++m) {
        if (den.coeffs[m] == 0) {
          if (num.coeffs[m] != 0) return std::nullopt;
          continue;
        }
        const Rational q = num.coeffs[m] / den.coeffs[m];
        if (r && *r != q) return std::nullopt;
        r = q;
      }
      return r ? r : std::optional<Rational>(Rational(1));
    };
    if (trial == 0) scalar = ratio_of(full, split);
    const auto here = ratio_of(full, split);
    mismatches += !(here && scalar && *here == *scalar);
    const auto unit_ratio = ratio_of(full, unit);
    unit_is_scalar &= unit_ratio.has_value();
  }
  const std::string s = scalar ? scalar->get_str() : "none";
  return {mismatches == 0 && scalar.has_value(),
          fmt::format("50 trials (n=2, |g|=4, K=6), global scalar {}, {} non-scalar discrepancies; "
                      "unit cross multiplicity {} a global scalar",
                      s, mismatches, unit_is_scalar ? "is" : "is not")};
}

// --- AC10 -----------------------------------------------------------------------

#ifndef RATCERT_BIN
#define RATCERT_BIN "ratcert"
#endif

struct Child {
  pid_t pid = -1;
};

Child spawn(const std::vector<std::string>& args, const std::filesystem::path& out) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid == 0) {
    const int fd = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int devnull = ::open("/dev/null", O_WRONLY);
    ::dup2(fd, 1);
    ::dup2(devnull, 2);
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  return {pid};
}

int wait_exit(const Child& c) {
  int status = 0;
  ::waitpid(c.pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is, nullptr, false);
}

Outcome ac10() {
  const std::size_t n = 4096;
  const PrimeField field(kDefaultPrime);
  const std::uint64_t seed = 1;
  const auto m = cli::bench_matrix(seed, n, n, field, 1);

  auto start = Clock::now();
  const auto single = rank_fp(m, {.panel_width = 256, .threads = 1});
  const double t1 = seconds_since(start);
  start = Clock::now();
  const auto multi = rank_fp(m, {.panel_width = 256, .threads = 8});
  const double t8 = seconds_since(start);
  const double speedup = t1 / t8;
  const bool ranks_agree = single.rank == multi.rank;

  // Kill a checkpointing run at a random moment, then resume it.
  const auto dir = std::filesystem::temp_directory_path() / fmt::format("ratcert-ac10-{}", ::getpid());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string bin = RATCERT_BIN;
  const std::vector<std::string> base{bin,      "rank",     "--n",   std::to_string(n), "--seed", std::to_string(seed),
                                      "--panel", "256", "--checkpoint-dir", dir.string()};
  const auto ckpt = dir / fmt::format("rank-n{}-s{}-p{}-w256.crkp", n, seed, kDefaultPrime);
  std::mt19937_64 rng(static_cast<std::uint64_t>(Clock::now().time_since_epoch().count()));
  std::size_t killed_at = 0;
  bool killed = false;
  for (int attempt = 0; attempt < 6 && !killed; ++attempt) {
    std::filesystem::remove(ckpt);
    auto args = base;
    args.insert(args.end(), {"--checkpoint-every", "1"});
    const Child c = spawn(args, dir / "killed.json");
    const double window = std::max(1.0, t1);
    std::this_thread::sleep_for(std::chrono::duration<double>(0.5 + window * (0.2 + 0.6 * (rng() % 1000) / 1000.0)));
    ::kill(c.pid, SIGKILL);
    const int code = wait_exit(c);
    if (code == -SIGKILL && std::filesystem::exists(ckpt)) {
      killed = true;
      killed_at = Eliminator::resume(ckpt).panels_done();
    }
  }
  bool resume_ok = false;
  std::string resume_detail = "kill never landed between checkpoints";
  if (killed) {
    auto args = base;
    args.push_back("--resume");
    const Child c = spawn(args, dir / "resumed.json");
    const int code = wait_exit(c);
    const auto j = read_json(dir / "resumed.json");
    resume_ok = code == 0 && !j.is_discarded() && j["resumed"] == true && j["rank"] == single.rank;
    resume_detail = fmt::format("killed after panel {}, resumed rank {}", killed_at,
                                j.is_discarded() ? std::string("?") : j["rank"].dump());
  }
  std::filesystem::remove_all(dir);

  const bool time_ok = t1 < 60.0;
  const bool speed_ok = speedup >= 4.0;
  return {time_ok && speed_ok && ranks_agree && resume_ok,
          fmt::format("rank {} ; 1 thread {:.2f}s ({}) ; 8 threads {:.2f}s, speedup {:.2f}x ({}, {} hardware "
                      "threads) ; {} ({})",
                      single.rank, t1, time_ok ? "ok" : "over 60s", t8, speedup, speed_ok ? "ok" : "below 4x",
                      std::thread::hardware_concurrency(), resume_detail, resume_ok ? "ok" : "bad")};
}

// --- AC11 -----------------------------------------------------------------------

Outcome ac11() {
  const std::vector<int> unknown{6, 7, 8, 11, 12, 14, 15, 16, 18, 20, 23, 24, 26, 32, 48};
  const std::map<int, std::string> methods{
      {1, "trivial"},        {2, "trivial"},        {3, "trivial"},        {4, "out-of-scope"},
      {5, "two-form"},       {9, "two-form"},       {10, "double-bundle"}, {13, "two-form"},
      {17, "two-form"},      {19, "covariant-S"},   {21, "two-form"},      {22, "covariant-S"},
      {25, "two-form"},      {27, "special"},       {28, "covariant-S"},   {29, "two-form"},
      {30, "double-bundle"}, {31, "covariant-S"}};
  cli::TableArgs args;
  args.to = 48;
  const auto r = cli::cmd_table(args);
  std::size_t bad = 0;
  for (const auto& row : r.report["rows"]) {
    const int d = row["d"];
    const bool is_unknown = std::find(unknown.begin(), unknown.end(), d) != unknown.end();
    bad += row["status"] != (is_unknown ? "unknown" : "rational");
    if (is_unknown) {
      bad += !row["method"].is_null();
    } else if (auto it = methods.find(d); it != methods.end()) {
      bad += row["method"] != it->second;
    }
  }
  bad += r.report["rows"].size() != 48;
  const std::string expected_line = "unknown: 6, 7, 8, 11, 12, 14, 15, 16, 18, 20, 23, 24, 26, 32, 48";
  std::string last;
  std::istringstream text(r.text);
  for (std::string line; std::getline(text, line);) {
    if (!line.empty()) last = line;
  }
  const bool line_ok = last == expected_line;
  return {bad == 0 && line_ok && r.report["unknown"] == unknown,
          fmt::format("48 rows, {} row mismatches, unknown line {}", bad, line_ok ? "byte-exact" : "differs: " + last)};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    fmt::print(stderr, "--only expects 1..{}\n", criteria.size());
    return 3;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    fmt::print("AC{} {} {}\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
