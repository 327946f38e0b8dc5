#pragma once

// Randomized certificate that a double-bundle candidate is generic: for a
// random x0 in V, psi(., x0) maps U onto W with a one-dimensional kernel
// spanned by y0, psi(y0, .) maps V onto W, and psi(x0, y0) = 0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratcert/chi_table.hpp"
#include "ratcert/field.hpp"
#include "ratcert/ranklab.hpp"
#include "ratcert/rep.hpp"
#include "ratcert/status.hpp"

namespace ratcert {

/// A bilinear map U x V -> W observed through point functionals on W.
/// Elements of U are spanned by powers u^e of vectors and elements of V by
/// powers v^d of covectors, so both sides are addressed by Vec3 samples.
class BilinearOracle {
 public:
  virtual ~BilinearOracle() = default;

  virtual const PrimeField& field() const = 0;
  virtual std::size_t dim_u() const = 0;
  virtual std::size_t dim_w() const = 0;
  /// Exponent e such that u^e is the U-element addressed by a vector u.
  virtual int u_degree() const = 0;

  /// out(s, k) = sum_j xi[j] psi(u_s^e, v_j^d)(pts[k]). out is us.size() x pts.size().
  virtual void fill_u_rows(std::span<const Vec3> us, std::span<const Vec3> vs, std::span<const Elem> xi,
                           std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const = 0;

  /// out(j, k) = sum_s eta[s] psi(u_s^e, v_j^d)(pts[k]). out is vs.size() x pts.size().
  virtual void fill_v_rows(std::span<const Vec3> us, std::span<const Elem> eta, std::span<const Vec3> vs,
                           std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const = 0;
};

/// psi = projection of S^e (x) D^d onto the summands of a candidate,
/// evaluated through a chi lookup table.
class ChiOracle final : public BilinearOracle {
 public:
  ChiOracle(const rep::Candidate& candidate, ChiTable table);

  const PrimeField& field() const override { return field_; }
  std::size_t dim_u() const override { return dim_u_; }
  std::size_t dim_w() const override { return dim_w_; }
  int u_degree() const override { return table_.e; }
  const ChiTable& table() const noexcept { return table_; }

  void fill_u_rows(std::span<const Vec3> us, std::span<const Vec3> vs, std::span<const Elem> xi,
                   std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const override;
  void fill_v_rows(std::span<const Vec3> us, std::span<const Elem> eta, std::span<const Vec3> vs,
                   std::span<const PointPair> pts, DenseMatrixFp& out, unsigned threads) const override;

 private:
  PrimeField field_;
  ChiTable table_;
  std::size_t dim_u_;
  std::size_t dim_w_;
};

struct GenericityInstance {
  rep::Candidate candidate;
  std::uint64_t prime = kDefaultPrime;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n_points;  // default dim_W + margin
  std::optional<std::size_t> t_terms;   // default dim_W + margin + 1
  std::size_t margin = 32;
  int max_retries = 3;
  unsigned threads = 1;
};

struct Verdict {
  Status status = Status::Inconclusive;
  rep::Candidate candidate;
  std::uint64_t prime = 0;
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  std::size_t t_terms = 0;  // summands of x0 in the last attempt
  std::size_t rank_a = 0;
  std::size_t kernel_dim = 0;
  std::size_t rank_n = 0;
  bool zero_check = false;
  int retries = 0;
  std::uint64_t sample_skips = 0;
  /// log10 of the chance (deg/p)^64 that a nonzero psi(x0, y0) vanishes at
  /// all zero-check points.
  double zero_check_log10_bound = 0.0;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const Verdict& v);

inline constexpr std::size_t kZeroCheckPoints = 64;

/// Runs the certificate against an arbitrary oracle. The instance supplies
/// the streams, sizes and retry policy; its candidate is only echoed.
Verdict run_double_bundle(const GenericityInstance& inst, const BilinearOracle& oracle);

/// Reduces chi for the candidate at inst.prime and runs the certificate.
/// Throws BadPrime if the prime is not admissible for the candidate.
Verdict run_check(const GenericityInstance& inst);

/// Evaluates psi on r vectors, s covectors and t point functionals in two
/// independent ways (symbolic projectors, and the chi formula over Q) and
/// checks that the resulting tensors agree entrywise. Requires e + f <= 6.
bool transpose_consistency(int e, int f, std::span<const int> components, std::size_t r, std::size_t s,
                           std::size_t t, std::uint64_t seed);

}  // namespace ratcert
