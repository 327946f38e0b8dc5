#include "ratcert/ranklab.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <new>

#include "ratcert/errors.hpp"
#include "ratcert/parallel.hpp"

namespace ratcert {
namespace {

constexpr std::size_t kBaseWidth = 16;
constexpr std::size_t kTile = 512;

using Clock = std::chrono::steady_clock;

// acc[j] += a * u[j] for j < n, rows of R accumulators sharing u.
template <int R>
inline void madd_rows(std::uint64_t* acc, std::size_t stride, const std::array<std::uint32_t, 4>& a,
                      const Elem* u, std::size_t n) {
  for (int r = 0; r < R; ++r) {
    std::uint64_t* out = acc + static_cast<std::size_t>(r) * stride;
    const std::uint64_t ar = a[static_cast<std::size_t>(r)];
    for (std::size_t j = 0; j < n; ++j) out[j] += ar * static_cast<std::uint64_t>(u[j]);
  }
}

template <int R>
inline void madd_group(std::uint64_t* acc, std::size_t stride, const std::array<std::uint32_t, 4>& a,
                       const Elem* u, std::size_t n) {
  // Fused loop so each u[j] is loaded once for all R rows.
  if constexpr (R == 4) {
    std::uint64_t* o0 = acc;
    std::uint64_t* o1 = acc + stride;
    std::uint64_t* o2 = acc + 2 * stride;
    std::uint64_t* o3 = acc + 3 * stride;
    const std::uint64_t a0 = a[0], a1 = a[1], a2 = a[2], a3 = a[3];
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t x = u[j];
      o0[j] += a0 * x;
      o1[j] += a1 * x;
      o2[j] += a2 * x;
      o3[j] += a3 * x;
    }
  } else {
    madd_rows<R>(acc, stride, a, u, n);
  }
}

}  // namespace

DenseMatrixFp::DenseMatrixFp(const PrimeField& field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols) {
  const std::size_t bytes = rows * cols * sizeof(Elem);
  try {
    data_.assign(rows * cols, 0);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix", bytes);
  } catch (const std::length_error&) {
    throw ResourceError("matrix size exceeds the address space", bytes);
  }
}

DenseMatrixFp DenseMatrixFp::identity(const PrimeField& field, std::size_t n) {
  DenseMatrixFp m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

DenseMatrixFp fill_streamed(const PrimeField& field, std::size_t rows, std::size_t cols,
                            const EntryGenerator& gen, unsigned threads) {
  return fill_rows(
      field, rows, cols,
      [&](std::size_t i, std::span<Elem> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = gen(i, j);
      },
      threads);
}

DenseMatrixFp fill_rows(const PrimeField& field, std::size_t rows, std::size_t cols,
                        const RowGenerator& gen, unsigned threads) {
  DenseMatrixFp m(field, rows, cols);
  parallel_for(rows, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) gen(i, m.row(i));
  });
  return m;
}

DenseMatrixFp transpose(const DenseMatrixFp& m) {
  DenseMatrixFp t(m.field(), m.cols(), m.rows());
  constexpr std::size_t kBlock = 64;
  for (std::size_t ib = 0; ib < m.rows(); ib += kBlock) {
    for (std::size_t jb = 0; jb < m.cols(); jb += kBlock) {
      for (std::size_t i = ib; i < std::min(ib + kBlock, m.rows()); ++i) {
        for (std::size_t j = jb; j < std::min(jb + kBlock, m.cols()); ++j) t.at(j, i) = m.at(i, j);
      }
    }
  }
  return t;
}

DenseMatrixFp multiply(const DenseMatrixFp& a, const DenseMatrixFp& b) {
  if (a.cols() != b.rows() || !(a.field() == b.field())) throw InvalidInput("nonconformable matrix product");
  const PrimeField& f = a.field();
  DenseMatrixFp c(f, a.rows(), b.cols());
  std::vector<std::uint64_t> acc(b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    std::uint64_t count = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (count == f.max_accumulation()) {
        for (auto& x : acc) x = f.reduce(x);
        count = 0;
      }
      const std::uint64_t aik = a.at(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += aik * brow[j];
      ++count;
    }
    for (std::size_t j = 0; j < b.cols(); ++j) c.at(i, j) = f.reduce(acc[j]);
  }
  return c;
}

std::vector<Elem> multiply(const DenseMatrixFp& m, std::span<const Elem> x) {
  if (x.size() != m.cols()) throw InvalidInput("vector length does not match matrix");
  const PrimeField& f = m.field();
  std::vector<Elem> y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::uint64_t acc = 0;
    std::uint64_t count = 0;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (count == f.max_accumulation()) {
        acc = f.reduce(acc);
        count = 0;
      }
      acc += std::uint64_t{row[j]} * x[j];
      ++count;
    }
    y[i] = f.reduce(acc);
  }
  return y;
}

// --- Eliminator -------------------------------------------------------------

Eliminator::Eliminator(DenseMatrixFp m, EliminationOptions options)
    : work_(std::move(m)), options_(options), orig_rows_(work_.rows()), orig_cols_(work_.cols()) {
  if (options_.panel_width == 0) throw InvalidInput("panel width must be positive");
  if (options_.threads == 0) options_.threads = 1;
}

bool Eliminator::done() const noexcept {
  return col_ >= work_.cols() || pivot_rows_ >= work_.rows();
}

void Eliminator::swap_rows(std::size_t a, std::size_t b) {
  auto ra = work_.row(a);
  auto rb = work_.row(b);
  std::swap_ranges(ra.begin(), ra.end(), rb.begin());
}

void Eliminator::factor_base(std::size_t r0, std::size_t c0, std::size_t c1, std::size_t& found) {
  const PrimeField& f = work_.field();
  const std::size_t rows = work_.rows();
  for (std::size_t col = c0; col < c1; ++col) {
    const std::size_t prow = r0 + found;
    if (prow >= rows) return;
    std::size_t piv = prow;
    while (piv < rows && work_.at(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != prow) swap_rows(piv, prow);
    pivcols_.push_back(col);
    const Elem inv = f.inv(work_.at(prow, col));
    const Elem* top = work_.row(prow).data();
    for (std::size_t i = prow + 1; i < rows; ++i) {
      Elem* r = work_.row(i).data();
      if (r[col] == 0) continue;
      const Elem m = f.mul(r[col], inv);
      for (std::size_t j = col + 1; j < c1; ++j) r[j] = f.sub(r[j], f.mul(m, top[j]));
      r[col] = m;  // multiplier kept in the eliminated slot
    }
    ++found;
  }
}

std::size_t Eliminator::factor(std::size_t r0, std::size_t c0, std::size_t c1) {
  if (r0 >= work_.rows() || c0 >= c1) return 0;
  if (c1 - c0 <= kBaseWidth) {
    std::size_t found = 0;
    factor_base(r0, c0, c1, found);
    return found;
  }
  const std::size_t mid = c0 + (c1 - c0) / 2;
  const std::size_t k1 = factor(r0, c0, mid);
  if (k1 > 0) {
    solve_pivot_rows(r0, k1, mid, c1);
    update_trailing(r0 + k1, work_.rows(), r0, k1, mid, c1, options_.threads);
  }
  return k1 + factor(r0 + k1, mid, c1);
}

// Pivot rows r0 .. r0+k-1 carry unit-lower multipliers among themselves;
// apply the inverse of that triangle to their columns [cb, ce).
void Eliminator::solve_pivot_rows(std::size_t r0, std::size_t k, std::size_t cb, std::size_t ce) {
  const PrimeField& f = work_.field();
  std::vector<std::uint64_t> acc(kTile);
  for (std::size_t t = 1; t < k; ++t) {
    Elem* row = work_.row(r0 + t).data();
    for (std::size_t jb = cb; jb < ce; jb += kTile) {
      const std::size_t n = std::min(kTile, ce - jb);
      for (std::size_t j = 0; j < n; ++j) acc[j] = row[jb + j];
      std::uint64_t count = 0;
      for (std::size_t s = 0; s < t; ++s) {
        const Elem l = row[pivcols_[r0 + s]];
        if (l == 0) continue;
        if (count == f.max_accumulation()) {
          for (std::size_t j = 0; j < n; ++j) acc[j] = f.reduce(acc[j]);
          count = 0;
        }
        const std::uint64_t a = f.neg(l);
        const Elem* u = work_.row(r0 + s).data() + jb;
        for (std::size_t j = 0; j < n; ++j) acc[j] += a * static_cast<std::uint64_t>(u[j]);
        ++count;
      }
      for (std::size_t j = 0; j < n; ++j) row[jb + j] = f.reduce(acc[j]);
    }
  }
}

// Rows [rb, re), columns [cb, ce): subtract sum_s L(row, s) * U(r0+s, .).
void Eliminator::update_trailing(std::size_t rb, std::size_t re, std::size_t r0, std::size_t k,
                                 std::size_t cb, std::size_t ce, unsigned threads) {
  if (rb >= re || cb >= ce || k == 0) return;
  const PrimeField& f = work_.field();
  const std::size_t* pc = pivcols_.data() + r0;
  const std::uint64_t max_acc = f.max_accumulation();

  auto worker = [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> acc(4 * kTile);
    std::vector<std::array<std::uint32_t, 4>> coef(k);
    for (std::size_t g = begin; g < end; g += 4) {
      const std::size_t nr = std::min<std::size_t>(4, end - g);
      for (std::size_t s = 0; s < k; ++s) {
        coef[s] = {0, 0, 0, 0};
        for (std::size_t r = 0; r < nr; ++r) coef[s][r] = f.neg(work_.at(rb + g + r, pc[s]));
      }
      for (std::size_t jb = cb; jb < ce; jb += kTile) {
        const std::size_t n = std::min(kTile, ce - jb);
        for (std::size_t r = 0; r < nr; ++r) {
          const Elem* src = work_.row(rb + g + r).data() + jb;
          for (std::size_t j = 0; j < n; ++j) acc[r * kTile + j] = src[j];
        }
        std::uint64_t count = 0;
        for (std::size_t s = 0; s < k; ++s) {
          const auto& a = coef[s];
          if ((a[0] | a[1] | a[2] | a[3]) == 0) continue;
          if (count == max_acc) {
            for (std::size_t r = 0; r < nr; ++r) {
              for (std::size_t j = 0; j < n; ++j) acc[r * kTile + j] = f.reduce(acc[r * kTile + j]);
            }
            count = 0;
          }
          const Elem* u = work_.row(r0 + s).data() + jb;
          switch (nr) {
            case 4: madd_group<4>(acc.data(), kTile, a, u, n); break;
            case 3: madd_group<3>(acc.data(), kTile, a, u, n); break;
            case 2: madd_group<2>(acc.data(), kTile, a, u, n); break;
            default: madd_group<1>(acc.data(), kTile, a, u, n); break;
          }
          ++count;
        }
        for (std::size_t r = 0; r < nr; ++r) {
          Elem* dst = work_.row(rb + g + r).data() + jb;
          for (std::size_t j = 0; j < n; ++j) dst[j] = f.reduce(acc[r * kTile + j]);
        }
      }
    }
  };

  // Row blocks are handed out in multiples of 4 rows.
  const std::size_t groups = (re - rb + 3) / 4;
  const std::size_t work_units = (re - rb) * (ce - cb) * k;
  const unsigned use = work_units < (1u << 18) ? 1u : threads;
  parallel_for(groups, use, [&](std::size_t gb, std::size_t ge) {
    worker(std::min(re - rb, gb * 4), std::min(re - rb, ge * 4));
  });
}

void Eliminator::step() {
  if (done()) return;
  const auto start = Clock::now();
  const std::size_t rows = work_.rows();
  const std::size_t cols = work_.cols();
  const std::size_t r0 = pivot_rows_;
  const std::size_t c0 = col_;
  const std::size_t c1 = std::min(cols, c0 + options_.panel_width);

  const std::size_t k = factor(r0, c0, c1);
  if (k > 0 && c1 < cols) {
    solve_pivot_rows(r0, k, c1, cols);
    update_trailing(r0 + k, rows, r0, k, c1, cols, options_.threads);
  }
  // Drop the stored multipliers so rows hold a clean echelon form.
  for (std::size_t i = r0; i < rows; ++i) {
    const std::size_t own = i - r0;
    for (std::size_t t = 0; t < k; ++t) {
      if (i < r0 + k && t >= own) break;
      work_.at(i, pivcols_[r0 + t]) = 0;
    }
  }
  pivot_rows_ += k;
  col_ = c1;
  ++panels_;
  elapsed_ += std::chrono::duration<double>(Clock::now() - start).count();
}

RankReport Eliminator::run() {
  while (!done()) step();
  return report();
}

RankReport Eliminator::report() const {
  RankReport r;
  r.rank = rank_so_far();
  r.rows = orig_rows_;
  r.cols = orig_cols_;
  r.p = work_.field().modulus();
  r.elapsed_seconds = elapsed_;
  r.panels = panels_;
  return r;
}

RankReport rank_fp(const DenseMatrixFp& m, EliminationOptions options) {
  Eliminator e(m, options);
  return e.run();
}

std::vector<std::vector<Elem>> nullspace_fp(const DenseMatrixFp& m, EliminationOptions options) {
  const PrimeField& f = m.field();
  Eliminator e(m, options);
  e.run();
  const DenseMatrixFp& u = e.work();
  const auto& piv = e.pivot_columns();
  const std::size_t rank = piv.size();

  std::vector<char> is_pivot(m.cols(), 0);
  for (std::size_t c : piv) is_pivot[c] = 1;

  std::vector<std::vector<Elem>> basis;
  for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Elem> x(m.cols(), 0);
    x[free_col] = 1;
    for (std::size_t t = rank; t-- > 0;) {
      const std::size_t pc = piv[t];
      const auto row = u.row(t);
      std::uint64_t acc = 0;
      std::uint64_t count = 0;
      for (std::size_t j = pc + 1; j < m.cols(); ++j) {
        if (x[j] == 0) continue;
        if (count == f.max_accumulation()) {
          acc = f.reduce(acc);
          count = 0;
        }
        acc += std::uint64_t{row[j]} * x[j];
        ++count;
      }
      x[pc] = f.neg(f.mul(f.reduce(acc), f.inv(row[pc])));
    }
    for (Elem y : multiply(m, x)) {
      if (y != 0) throw InternalError("nullspace vector failed verification");
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace ratcert
