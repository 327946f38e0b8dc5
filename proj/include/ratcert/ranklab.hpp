#pragma once

// Dense exact linear algebra over GF(p): streamed fill, blocked elimination
// with delayed modular reduction, rank, nullspace, and checkpoint/resume at
// panel boundaries.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratcert/field.hpp"

namespace ratcert {

class DenseMatrixFp {
 public:
  /// Zero matrix. Throws ResourceError if the storage cannot be allocated.
  DenseMatrixFp(const PrimeField& field, std::size_t rows, std::size_t cols);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Elem at(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  Elem& at(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  std::span<Elem> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const Elem> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const Elem> data() const noexcept { return data_; }
  std::span<Elem> data() noexcept { return data_; }

  static DenseMatrixFp identity(const PrimeField& field, std::size_t n);

  friend bool operator==(const DenseMatrixFp& a, const DenseMatrixFp& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> data_;
};

using EntryGenerator = std::function<Elem(std::size_t, std::size_t)>;
using RowGenerator = std::function<void(std::size_t, std::span<Elem>)>;

/// data[i*cols + j] = gen(i, j). gen must be pure; rows are split across
/// workers and the result does not depend on the worker count.
DenseMatrixFp fill_streamed(const PrimeField& field, std::size_t rows, std::size_t cols,
                            const EntryGenerator& gen, unsigned threads = 1);

/// Row-at-a-time variant for generators that share work along a row.
DenseMatrixFp fill_rows(const PrimeField& field, std::size_t rows, std::size_t cols,
                        const RowGenerator& gen, unsigned threads = 1);

DenseMatrixFp transpose(const DenseMatrixFp& m);
DenseMatrixFp multiply(const DenseMatrixFp& a, const DenseMatrixFp& b);
std::vector<Elem> multiply(const DenseMatrixFp& m, std::span<const Elem> x);

struct EliminationOptions {
  std::size_t panel_width = 256;
  unsigned threads = 1;
};

struct RankReport {
  std::size_t rank = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t p = 0;
  double elapsed_seconds = 0.0;
  std::size_t panels = 0;
  std::optional<std::string> checkpoint_id;
};

/// Right-looking blocked row echelon reduction. Panels of panel_width columns
/// are eliminated one at a time (recursively split inside the panel); the
/// trailing update after each panel is split by rows across workers. The
/// pivot in each column is the first nonzero entry at or below the current
/// pivot row, so the echelon form does not depend on panel width or threads.
class Eliminator {
 public:
  explicit Eliminator(DenseMatrixFp m, EliminationOptions options = {});

  /// Continues from a checkpoint written with the same panel width.
  /// Throws CorruptCheckpoint on magic, size or CRC mismatch.
  static Eliminator resume(const std::filesystem::path& path, EliminationOptions options = {});

  bool done() const noexcept;
  /// Eliminates one panel.
  void step();
  RankReport run();

  std::size_t rank_so_far() const noexcept { return base_rank_ + pivot_rows_; }
  std::size_t panels_done() const noexcept { return panels_; }
  RankReport report() const;

  /// "CRKP" u32 version, u64 p, u64 rows, u64 cols, u32 panels_done,
  /// u32 rank_so_far, u64 CRC64 of the preceding 40 bytes, the residual
  /// trailing matrix row-major as u32, u64 CRC64 of the residual.
  void write_checkpoint(const std::filesystem::path& path) const;

  /// Echelon rows are work().row(0 .. rank-1), with pivots at pivot_columns().
  /// Only meaningful for an eliminator that was not resumed.
  const DenseMatrixFp& work() const noexcept { return work_; }
  const std::vector<std::size_t>& pivot_columns() const noexcept { return pivcols_; }
  bool resumed() const noexcept { return resumed_; }

 private:
  std::size_t factor(std::size_t r0, std::size_t c0, std::size_t c1);
  void factor_base(std::size_t r0, std::size_t c0, std::size_t c1, std::size_t& found);
  void solve_pivot_rows(std::size_t r0, std::size_t k, std::size_t cb, std::size_t ce);
  void update_trailing(std::size_t rb, std::size_t re, std::size_t r0, std::size_t k, std::size_t cb,
                       std::size_t ce, unsigned threads);
  void swap_rows(std::size_t a, std::size_t b);

  DenseMatrixFp work_;
  EliminationOptions options_;
  std::size_t orig_rows_;
  std::size_t orig_cols_;
  std::size_t base_rank_ = 0;
  std::size_t base_cols_ = 0;
  std::size_t pivot_rows_ = 0;  // pivot rows found in work_
  std::size_t col_ = 0;         // columns of work_ consumed
  std::size_t panels_ = 0;
  bool resumed_ = false;
  double elapsed_ = 0.0;
  std::vector<std::size_t> pivcols_;
};

RankReport rank_fp(const DenseMatrixFp& m, EliminationOptions options = {});

/// Basis of {x : m x = 0}; every vector is checked against m before return.
std::vector<std::vector<Elem>> nullspace_fp(const DenseMatrixFp& m, EliminationOptions options = {});

}  // namespace ratcert
