#include "ratcert/genericity.hpp"

#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "ratcert/errors.hpp"
#include "ratcert/parallel.hpp"
#include "ratcert/projops.hpp"
#include "ratcert/sampling.hpp"

namespace ratcert {
namespace {

using Clock = std::chrono::steady_clock;

// Sum of acc terms with a reduction every max_accumulation additions.
class Accumulator {
 public:
  explicit Accumulator(const PrimeField& f) : f_(f), limit_(f.max_accumulation()) {}
  void add(Elem a, Elem b) {
    if (count_ == limit_) {
      acc_ = f_.reduce(acc_);
      count_ = 0;
    }
    acc_ += std::uint64_t{a} * b;
    ++count_;
  }
  Elem value() const { return f_.reduce(acc_); }

 private:
  const PrimeField& f_;
  std::uint64_t limit_;
  std::uint64_t acc_ = 0;
  std::uint64_t count_ = 0;
};

std::vector<Vec3> draw_nonzero_vec3s(SampleCursor& cur, std::size_t n) {
  std::vector<Vec3> out(n);
  for (auto& v : out) v = cur.next_nonzero_vec3();
  return out;
}

std::vector<PointPair> draw_points(SampleCursor& cur, std::size_t n) {
  std::vector<PointPair> out(n);
  for (auto& pt : out) {
    pt.pcov = cur.next_nonzero_vec3();
    pt.qvec = cur.next_nonzero_vec3();
  }
  return out;
}

std::string attempt_label(std::string_view base, int attempt) {
  return std::string(base) + "#" + std::to_string(attempt);
}

}  // namespace

// --- ChiOracle --------------------------------------------------------------

ChiOracle::ChiOracle(const rep::Candidate& candidate, ChiTable table)
    : field_(table.p), table_(std::move(table)), dim_u_(candidate.dim_u), dim_w_(candidate.dim_w) {
  if (table_.e != candidate.e || table_.f != candidate.d) {
    throw InvalidInput("chi table is for (e, f) = (" + std::to_string(table_.e) + ", " +
                       std::to_string(table_.f) + "), candidate needs (" + std::to_string(candidate.e) +
                       ", " + std::to_string(candidate.d) + ")");
  }
  if (table_.values.size() != table_.p) throw InvalidInput("chi table has the wrong length");
}

void ChiOracle::fill_u_rows(std::span<const Vec3> us, std::span<const Vec3> vs, std::span<const Elem> xi,
                            std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const {
  const PrimeField& f = field_;
  const std::size_t ns = us.size(), nt = vs.size(), nk = pts.size();
  if (xi.size() != nt || out.rows() != ns || out.cols() != nk) throw InvalidInput("fill_u_rows: size mismatch");
  const auto e = static_cast<std::uint64_t>(table_.e);
  const auto fd = static_cast<std::uint64_t>(table_.f);
  const Elem* tbl = table_.values.data();

  // Per point k and term j: 1/v_j(q_k) and xi_j v_j(q_k)^f. Terms with
  // v_j(q_k) = 0 go through eval_psi instead.
  std::vector<Elem> inv_vq(nk * nt), beta(nk * nt), dk(nk);
  std::vector<std::vector<std::size_t>> degenerate(nk);
  parallel_for(nk, threads, [&](std::size_t kb, std::size_t ke) {
    std::vector<Elem> row(nt);
    for (std::size_t k = kb; k < ke; ++k) {
      dk[k] = f.dot(pts[k].pcov, pts[k].qvec);
      for (std::size_t j = 0; j < nt; ++j) {
        const Elem vq = f.dot(vs[j], pts[k].qvec);
        beta[k * nt + j] = vq == 0 ? 0 : f.mul(xi[j], f.pow(vq, fd));
        if (vq == 0) degenerate[k].push_back(j);
        row[j] = vq == 0 ? 1 : vq;
      }
      f.batch_inverse(row);
      std::copy(row.begin(), row.end(), inv_vq.begin() + static_cast<std::ptrdiff_t>(k * nt));
    }
  });

  parallel_for(ns, threads, [&](std::size_t sb, std::size_t se) {
    std::vector<Elem> vu(nt), up(nk), inv_up(nk);
    for (std::size_t s = sb; s < se; ++s) {
      for (std::size_t j = 0; j < nt; ++j) vu[j] = f.dot(vs[j], us[s]);
      for (std::size_t k = 0; k < nk; ++k) {
        up[k] = f.dot(us[s], pts[k].pcov);
        inv_up[k] = up[k] == 0 ? 1 : up[k];
      }
      f.batch_inverse(inv_up);
      for (std::size_t k = 0; k < nk; ++k) {
        if (up[k] == 0) {
          Accumulator slow(f);
          for (std::size_t j = 0; j < nt; ++j) slow.add(xi[j], eval_psi(us[s], vs[j], pts[k], table_, f));
          out.at(s, k) = slow.value();
          continue;
        }
        const Elem alpha = f.mul(dk[k], inv_up[k]);
        const Elem* iv = inv_vq.data() + k * nt;
        const Elem* bt = beta.data() + k * nt;
        Accumulator acc(f);
        for (std::size_t j = 0; j < nt; ++j) acc.add(bt[j], tbl[f.mul(alpha, f.mul(vu[j], iv[j]))]);
        Elem value = f.mul(f.pow(up[k], e), acc.value());
        for (std::size_t j : degenerate[k]) {
          value = f.add(value, f.mul(xi[j], eval_psi(us[s], vs[j], pts[k], table_, f)));
        }
        out.at(s, k) = value;
      }
    }
  });
}

void ChiOracle::fill_v_rows(std::span<const Vec3> us, std::span<const Elem> eta, std::span<const Vec3> vs,
                            std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const {
  const PrimeField& f = field_;
  const std::size_t ns = us.size(), nj = vs.size(), nk = pts.size();
  if (eta.size() != ns || out.rows() != nj || out.cols() != nk) throw InvalidInput("fill_v_rows: size mismatch");
  const auto e = static_cast<std::uint64_t>(table_.e);
  const auto fd = static_cast<std::uint64_t>(table_.f);
  const Elem* tbl = table_.values.data();

  // Per point k and basis vector s: 1/u_s(p_k) and eta_s u_s(p_k)^e.
  std::vector<Elem> inv_up(nk * ns), gamma(nk * ns), dk(nk);
  std::vector<std::vector<std::size_t>> degenerate(nk);
  parallel_for(nk, threads, [&](std::size_t kb, std::size_t ke) {
    std::vector<Elem> row(ns);
    for (std::size_t k = kb; k < ke; ++k) {
      dk[k] = f.dot(pts[k].pcov, pts[k].qvec);
      for (std::size_t s = 0; s < ns; ++s) {
        const Elem up = f.dot(us[s], pts[k].pcov);
        gamma[k * ns + s] = up == 0 ? 0 : f.mul(eta[s], f.pow(up, e));
        if (up == 0) degenerate[k].push_back(s);
        row[s] = up == 0 ? 1 : up;
      }
      f.batch_inverse(row);
      std::copy(row.begin(), row.end(), inv_up.begin() + static_cast<std::ptrdiff_t>(k * ns));
    }
  });

  parallel_for(nj, threads, [&](std::size_t jb, std::size_t je) {
    std::vector<Elem> vu(ns), vq(nk), inv_vq(nk);
    for (std::size_t j = jb; j < je; ++j) {
      for (std::size_t s = 0; s < ns; ++s) vu[s] = f.dot(vs[j], us[s]);
      for (std::size_t k = 0; k < nk; ++k) {
        vq[k] = f.dot(vs[j], pts[k].qvec);
        inv_vq[k] = vq[k] == 0 ? 1 : vq[k];
      }
      f.batch_inverse(inv_vq);
      for (std::size_t k = 0; k < nk; ++k) {
        if (vq[k] == 0) {
          Accumulator slow(f);
          for (std::size_t s = 0; s < ns; ++s) slow.add(eta[s], eval_psi(us[s], vs[j], pts[k], table_, f));
          out.at(j, k) = slow.value();
          continue;
        }
        const Elem alpha = f.mul(dk[k], inv_vq[k]);
        const Elem* iu = inv_up.data() + k * ns;
        const Elem* gm = gamma.data() + k * ns;
        Accumulator acc(f);
        for (std::size_t s = 0; s < ns; ++s) acc.add(gm[s], tbl[f.mul(alpha, f.mul(vu[s], iu[s]))]);
        Elem value = f.mul(f.pow(vq[k], fd), acc.value());
        for (std::size_t s : degenerate[k]) {
          value = f.add(value, f.mul(eta[s], eval_psi(us[s], vs[j], pts[k], table_, f)));
        }
        out.at(j, k) = value;
      }
    }
  });
}

// --- certificate --------------------------------------------------------------

nlohmann::json to_json(const Verdict& v) {
  return {{"d", v.candidate.d},
          {"e", v.candidate.e},
          {"components", v.candidate.components},
          {"prime", v.prime},
          {"seed", v.seed},
          {"nPoints", v.n_points},
          {"tTerms", v.t_terms},
          {"rankA", v.rank_a},
          {"kernelDim", v.kernel_dim},
          {"rankN", v.rank_n},
          {"zeroCheck", v.zero_check},
          {"zeroCheckLog10Bound", v.zero_check_log10_bound},
          {"status", to_string(v.status)},
          {"retries", v.retries},
          {"sampleSkips", v.sample_skips},
          {"wallSeconds", v.wall_seconds}};
}

Verdict run_double_bundle(const GenericityInstance& inst, const BilinearOracle& oracle) {
  const auto start = Clock::now();
  const PrimeField& f = oracle.field();
  const std::size_t dim_u = oracle.dim_u();
  const std::size_t dim_w = oracle.dim_w();
  const std::size_t n_points = inst.n_points.value_or(dim_w + inst.margin);
  const std::size_t t0 = inst.t_terms.value_or(dim_w + inst.margin + 1);
  const EliminationOptions elim{.panel_width = 256, .threads = inst.threads};
  if (n_points < dim_w) throw InvalidInput("n_points must be at least dim W");

  Verdict v;
  v.candidate = inst.candidate;
  v.prime = f.modulus();
  v.seed = inst.seed;
  v.n_points = n_points;
  const double deg = 2.0 * std::max(1, inst.candidate.d);
  v.zero_check_log10_bound = static_cast<double>(kZeroCheckPoints) * std::log10(deg / static_cast<double>(f.modulus()));

  for (int attempt = 0; attempt <= inst.max_retries; ++attempt) {
    const std::size_t t_terms = t0 << attempt;
    v.retries = attempt;
    v.t_terms = t_terms;
    v.rank_a = v.rank_n = v.kernel_dim = 0;
    v.zero_check = false;

    // (1) x0 = sum_j xi_j v_j^d.
    SampleCursor x0_cur(SampleStream(inst.seed, attempt_label("x0", attempt)), f);
    const auto vs = draw_nonzero_vec3s(x0_cur, t_terms);
    std::vector<Elem> xi(t_terms);
    for (auto& x : xi) x = x0_cur.next_nonzero();

    // (2) u_s^e, resampled until they are a basis of U.
    SampleCursor u_cur(SampleStream(inst.seed, attempt_label("u-basis", attempt)), f);
    SampleCursor ub_cur(SampleStream(inst.seed, attempt_label("u-basis-points", attempt)), f);
    std::vector<Vec3> us;
    bool basis = false;
    for (int draw = 0; draw < 4 && !basis; ++draw) {
      us = draw_nonzero_vec3s(u_cur, dim_u);
      const auto probe = draw_nonzero_vec3s(ub_cur, dim_u + inst.margin);
      const auto e = static_cast<std::uint64_t>(oracle.u_degree());
      const auto b = fill_rows(
          f, dim_u, probe.size(),
          [&](std::size_t s, std::span<Elem> row) {
            for (std::size_t k = 0; k < row.size(); ++k) row[k] = f.pow(f.dot(us[s], probe[k]), e);
          },
          inst.threads);
      basis = rank_fp(b, elim).rank == dim_u;
      if (!basis) spdlog::warn("stage=u-basis attempt={} draw={} rank-deficient, resampling", attempt, draw);
    }
    if (!basis) {
      spdlog::warn("stage=u-basis attempt={} no basis found", attempt);
      continue;
    }

    // (3) A(s, k) = psi(u_s^e, x0)(pt_k).
    SampleCursor pa_cur(SampleStream(inst.seed, attempt_label("points-a", attempt)), f);
    const auto pts_a = draw_points(pa_cur, n_points);
    DenseMatrixFp a(f, dim_u, n_points);
    oracle.fill_u_rows(us, vs, xi, pts_a, a, inst.threads);

    // (4) rank and left kernel of A.
    v.rank_a = rank_fp(a, elim).rank;
    spdlog::info("stage=rank-a attempt={} tTerms={} rankA={} dimW={}", attempt, t_terms, v.rank_a, dim_w);
    if (v.rank_a > dim_w) throw InternalError("rank of A exceeds dim W: the oracle is not W-valued");
    const auto kernel = nullspace_fp(transpose(a), elim);
    v.kernel_dim = kernel.size();
    if (v.rank_a != dim_w || v.kernel_dim != 1) continue;
    const std::vector<Elem>& eta = kernel.front();

    // (5) N(j, k) = psi(y0, v'_j^d)(pt'_k).
    SampleCursor vn_cur(SampleStream(inst.seed, attempt_label("v-prime", attempt)), f);
    SampleCursor pn_cur(SampleStream(inst.seed, attempt_label("points-n", attempt)), f);
    const auto vps = draw_nonzero_vec3s(vn_cur, n_points);
    const auto pts_n = draw_points(pn_cur, n_points);
    DenseMatrixFp n(f, n_points, n_points);
    oracle.fill_v_rows(us, eta, vps, pts_n, n, inst.threads);
    v.rank_n = rank_fp(n, elim).rank;
    spdlog::info("stage=rank-n attempt={} rankN={} dimW={}", attempt, v.rank_n, dim_w);
    if (v.rank_n > dim_w) throw InternalError("rank of N exceeds dim W: the oracle is not W-valued");

    // (6) psi(y0, x0) vanishes at fresh points.
    SampleCursor pz_cur(SampleStream(inst.seed, attempt_label("points-zero", attempt)), f);
    const auto pts_z = draw_points(pz_cur, kZeroCheckPoints);
    DenseMatrixFp z(f, dim_u, kZeroCheckPoints);
    oracle.fill_u_rows(us, vs, xi, pts_z, z, inst.threads);
    const auto zt = multiply(transpose(z), eta);
    v.zero_check = std::all_of(zt.begin(), zt.end(), [](Elem x) { return x == 0; });
    spdlog::info("stage=zero-check attempt={} ok={}", attempt, v.zero_check);

    v.sample_skips = x0_cur.skips() + u_cur.skips() + ub_cur.skips() + pa_cur.skips() + vn_cur.skips() +
                     pn_cur.skips() + pz_cur.skips();
    if (v.rank_n == dim_w && v.zero_check) {
      v.status = Status::Pass;
      break;
    }
  }
  v.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return v;
}

Verdict run_check(const GenericityInstance& inst) {
  const auto problems = rep::validate(inst.candidate);
  if (!problems.empty()) throw InvalidInput("invalid candidate: " + problems.front());
  const PrimeField field(inst.prime);
  const auto t0 = Clock::now();
  const ChiPoly chi = chi_poly(inst.candidate.e, inst.candidate.d, inst.candidate.components);
  ChiTable table = reduce_chi(chi, field);
  spdlog::info("stage=chi-table d={} e={} p={} seconds={:.3f}", inst.candidate.d, inst.candidate.e, inst.prime,
               std::chrono::duration<double>(Clock::now() - t0).count());
  const ChiOracle oracle(inst.candidate, std::move(table));
  Verdict v = run_double_bundle(inst, oracle);
  v.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return v;
}

// --- transpose consistency --------------------------------------------------

bool transpose_consistency(int e, int f, std::span<const int> components, std::size_t r, std::size_t s,
                           std::size_t t, std::uint64_t seed) {
  if (e < 0 || f < 0 || e + f > 6) throw InvalidInput("transpose_consistency needs e + f <= 6");
  const ChiPoly chi = chi_poly(e, f, components);
  std::vector<ProjectorCoeffs> projectors;
  for (int i : components) projectors.push_back(projector_coeffs(e, f, i));

  const SampleStream stream(seed, "transpose-consistency");
  std::uint64_t pos = 0;
  auto small = [&] { return Rational(static_cast<long>(stream.word(pos++) % 11) - 5); };
  auto vec = [&] { return QVec3{small(), small(), small()}; };
  std::vector<QVec3> us(r), vs(s), ps(t), qs(t);
  for (auto& u : us) u = vec();
  for (auto& v : vs) v = vec();
  for (std::size_t k = 0; k < t; ++k) {
    ps[k] = vec();
    qs[k] = vec();
  }
  auto dot = [](const QVec3& a, const QVec3& b) -> Rational { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  auto power = [](Rational x, int k) {
    Rational y = 1;
    for (int i = 0; i < k; ++i) y *= x;
    return y;
  };

  // M^k(i, j) via the projectors, N^i(k, j) via chi.
  std::vector<Rational> m(t * r * s);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const BiForm pure = BiForm::pure_power(us[i], e, vs[j], f);
      BiForm image(e, f);
      for (const auto& pc : projectors) image += apply_projector(pc, pure);
      for (std::size_t k = 0; k < t; ++k) m[(k * r + i) * s + j] = image.evaluate(ps[k], qs[k]);
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < t; ++k) {
      for (std::size_t j = 0; j < s; ++j) {
        const Rational x = dot(ps[k], qs[k]) * dot(vs[j], us[i]);
        const Rational y = dot(us[i], ps[k]) * dot(vs[j], qs[k]);
        Rational chi_xy = 0;
        for (int c = 0; c <= e; ++c) chi_xy += chi.coeffs[static_cast<std::size_t>(c)] * power(x, c) * power(y, e - c);
        const Rational n_ikj = power(dot(vs[j], qs[k]), f - e) * chi_xy;
        if (n_ikj != m[(k * r + i) * s + j]) return false;
      }
    }
  }
  return true;
}

}  // namespace ratcert
