#pragma once

// Quartic covariants of ternary forms evaluated on sums of powers of linear
// forms through the bracket invariant I, the interpolation construction of
// fiber elements f(c), and the spanning check over a fixed fiber.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include "ratcert/biform.hpp"
#include "ratcert/errors.hpp"
#include "ratcert/field.hpp"
#include "ratcert/sampling.hpp"
#include "ratcert/status.hpp"

namespace ratcert {

inline Rational one_like(const Rational&) { return 1; }
inline Rational zero_like(const Rational&) { return 0; }
inline Rational from_mpz(const Rational&, const mpz_class& z) { return Rational(z); }
inline Fp from_mpz(const Fp& like, const mpz_class& z) {
  return Fp::raw(like.field(), static_cast<Elem>(mpz_fdiv_ui(z.get_mpz_t(), like.field().modulus())));
}

namespace cov {

class DuplicateNode : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class CollidingC : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Coefficients of x1, x2, x3.
template <class S>
using LinForm = std::array<S, 3>;

template <class S>
struct PowerSumTerm {
  S coeff;
  LinForm<S> form;
};

/// sum_t coeff_t * form_t^degree.
template <class S>
struct PowerSumForm {
  int degree = 0;
  std::vector<PowerSumTerm<S>> terms;
};

/// Dense form of the given degree. Monomials x1^i x2^j x3^k are ordered by
/// descending i, then descending j.
template <class S>
struct TernaryForm {
  int degree = 0;
  std::vector<S> coeffs;

  bool operator==(const TernaryForm&) const = default;
};

/// Nodes b_1..b_K, the pencil y = lambda x2 + mu x3, and the parameter c.
/// The forms l_i = b_i x1 + y and h = c x1 + y lie in the pencil span{x1, y}.
template <class S>
struct InterpolationData {
  std::vector<S> b;
  S lambda;
  S mu;
  S c;
};

std::size_t ternary_dim(int degree);
std::size_t monomial_index(int degree, int i, int j);
/// Exponent triples in basis order.
std::vector<std::array<int, 3>> monomial_exponents(int degree);

template <class S>
TernaryForm<S> zero_form(int degree, const S& like);

/// Product with a linear form.
template <class S>
TernaryForm<S> mul_linear(const TernaryForm<S>& f, const LinForm<S>& l);

/// Expands a power sum into its dense coefficient vector.
template <class S>
TernaryForm<S> expand(const PowerSumForm<S>& f);

/// Lagrange weights p_i(c) = prod_{j != i} (c - b_j) / (b_i - b_j).
template <class S>
std::vector<S> interp_weights(const std::vector<S>& b, const S& c);

/// f(c) = sum_i p_i(c) l_i^d - (c x1 + y)^d, K + 1 terms. Requires d > K.
template <class S>
PowerSumForm<S> build_fc(const InterpolationData<S>& data, int d);

/// True if every monomial with x1-exponent below k has coefficient zero.
template <class S>
bool divisible_by_x1_power(const TernaryForm<S>& f, int k);

template <class S>
S bracket(const LinForm<S>& a, const LinForm<S>& b, const LinForm<S>& c);

/// (abc)(abd)(acd)(bcd).
template <class S>
S bracket_I(const LinForm<S>& a, const LinForm<S>& b, const LinForm<S>& c, const LinForm<S>& d);

/// Sum over ordered quadruples of terms of a a a a I^n (L L L L)^w, by
/// the literal quadruple loop.
template <class S>
TernaryForm<S> cov_quad_ordered(const PowerSumForm<S>& f, int n, int w);

/// Same sum over strictly increasing quadruples times 24. I is symmetric
/// and vanishes on repeated arguments, so the two agree.
template <class S>
TernaryForm<S> cov_quad(const PowerSumForm<S>& f, int n, int w);

/// Sum over i and ordered triples (j, k, q) of g of
/// p_i a_j a_k a_q I(l_i, m_j, m_k, m_q)^n (l_i m_j m_k m_q)^w, times
/// cross_multiplicity, plus cov_quad of {-(c x1 + y)^d} + g. With the
/// default multiplicity 4 (the number of slots a single pencil form can
/// occupy) this equals cov_quad of f(c) + g whenever K > 2n + w.
template <class S>
TernaryForm<S> eval_cov_fiber(const InterpolationData<S>& data, const PowerSumForm<S>& g, int n, int w,
                              int cross_multiplicity = 4);

/// Degree, n, w, K and target dimension for a degree d.
struct CovariantCase {
  char tag = 'S';  // 'S' for d = 3n+1, 'T' for d = 3n+2
  int d = 0;
  int n = 0;
  int w = 1;
  int k_nodes = 0;
  std::size_t target = 0;
};

/// Throws InvalidInput unless d = 1 (mod 3), d >= 19 or d = 2 (mod 3), d >= 35.
CovariantCase covariant_case(int d);

/// S or T on the fiber through a fixed g, evaluated fast over GF(p).
/// Precomputes everything that depends only on g, including cov_quad(g).
class FiberEvaluator {
 public:
  FiberEvaluator(const PrimeField& field, const PowerSumForm<Fp>& g, int n, int w);

  /// 4 sum_i p_i X(l_i) - 4 X(h) + cov_quad(g), with
  /// X(l) = sum over ordered triples a a a I(l, m, m, m)^n (l m m m)^w.
  std::vector<Elem> evaluate(const InterpolationData<Fp>& data) const;

  /// X(l) as a dense degree-4w form.
  std::vector<Elem> cross(const Vec3& l) const;

  const std::vector<Elem>& base() const noexcept { return base_; }

 private:
  struct Triple {
    std::uint32_t jk, jq, kq;  // indices into the pair brackets
    Elem bracket;              // (m_j m_k m_q)
  };

  const PrimeField& field_;
  int n_;
  int w_;
  std::size_t terms_;
  std::vector<Vec3> pair_cross_;   // m_j x m_k for j < k
  std::vector<Triple> triples_;
  std::vector<Elem> triple_poly_;  // 6 a_j a_k a_q (m_j m_k m_q)^w, ternary_dim(3w) each
  std::vector<Elem> base_;         // cov_quad(g)
};

/// Draws nodes, pencil and c from a cursor, redrawing colliding values.
InterpolationData<Fp> draw_interpolation(SampleCursor& cur, const PrimeField& field, int k_nodes);

struct SpanOptions {
  int d = 0;
  std::uint64_t prime = kDefaultPrime;
  std::uint64_t seed = 1;
  std::optional<std::size_t> samples;  // default 2 x target
  std::size_t g_terms = 20;
  int max_escalations = 2;
  unsigned threads = 1;
};

struct SpanReport {
  int d = 0;
  char case_tag = 'S';
  std::uint64_t prime = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t g_terms = 0;
  std::size_t rank = 0;
  std::size_t needed = 0;
  Status status = Status::Inconclusive;
  int escalations = 0;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const SpanReport& r);

/// Fixes a random g, evaluates the covariant at `samples` random points of
/// the fiber through g, and certifies that the values span the target
/// space. On failure g is redrawn with twice as many terms, up to
/// max_escalations times. Throws InvalidInput if samples < target.
SpanReport span_check(const SpanOptions& opts);

}  // namespace cov
}  // namespace ratcert
