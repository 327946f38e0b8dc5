#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ratcert/covariants.hpp"

using namespace ratcert;
using namespace ratcert::cov;

namespace {

using Q = Rational;

Q small(std::mt19937_64& rng, int bound = 5) {
  return Q(static_cast<long>(rng() % (2 * bound + 1)) - bound);
}

LinForm<Q> random_form(std::mt19937_64& rng) {
  LinForm<Q> l{small(rng), small(rng), small(rng)};
  while (l[0] == 0 && l[1] == 0 && l[2] == 0) l = {small(rng), small(rng), small(rng)};
  return l;
}

PowerSumForm<Q> random_sum(std::mt19937_64& rng, int degree, std::size_t terms) {
  PowerSumForm<Q> f{degree, {}};
  for (std::size_t t = 0; t < terms; ++t) {
    Q a = small(rng);
    if (a == 0) a = 1;
    f.terms.push_back({a, random_form(rng)});
  }
  return f;
}

// Distinct integer nodes, a pencil and a c off the nodes.
InterpolationData<Q> random_interp(std::mt19937_64& rng, int k) {
  std::vector<long> pool;
  for (long v = -20; v <= 20; ++v) pool.push_back(v);
  std::shuffle(pool.begin(), pool.end(), rng);
  InterpolationData<Q> data;
  for (int i = 0; i < k; ++i) data.b.push_back(Q(pool[static_cast<std::size_t>(i)]));
  data.c = Q(pool[static_cast<std::size_t>(k)]);
  data.lambda = small(rng);
  data.mu = small(rng);
  if (data.lambda == 0 && data.mu == 0) data.mu = 1;
  return data;
}

template <class S>
PowerSumForm<S> join(const PowerSumForm<S>& a, const PowerSumForm<S>& b) {
  PowerSumForm<S> out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

Q evaluate(const TernaryForm<Q>& f, const std::array<Q, 3>& x) {
  Q out = 0;
  const auto exps = monomial_exponents(f.degree);
  for (std::size_t m = 0; m < exps.size(); ++m) {
    Q term = f.coeffs[m];
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < exps[m][static_cast<std::size_t>(r)]; ++k) term *= x[static_cast<std::size_t>(r)];
    }
    out += term;
  }
  return out;
}

using Mat3 = std::array<std::array<Q, 3>, 3>;

Q det(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// m . (A x) = (A^T m) . x
LinForm<Q> pull_back(const Mat3& a, const LinForm<Q>& m) {
  LinForm<Q> out{Q(0), Q(0), Q(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) out[j] += a[i][j] * m[i];
  }
  return out;
}

std::array<Q, 3> apply(const Mat3& a, const std::array<Q, 3>& x) {
  std::array<Q, 3> out{Q(0), Q(0), Q(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) out[i] += a[i][j] * x[j];
  }
  return out;
}

Mat3 random_invertible(std::mt19937_64& rng) {
  Mat3 a;
  do {
    for (auto& row : a) {
      for (auto& x : row) x = small(rng, 3);
    }
  } while (det(a) == 0);
  return a;
}

template <class S>
std::vector<Elem> values(const TernaryForm<S>& f) {
  std::vector<Elem> out;
  for (const auto& c : f.coeffs) out.push_back(c.value());
  return out;
}

PowerSumForm<Fp> reduce(const PowerSumForm<Q>& f, const PrimeField& field) {
  auto r = [&](const Q& q) { return Fp(field, q.get_num().get_si()) / Fp(field, q.get_den().get_si()); };
  PowerSumForm<Fp> out{f.degree, {}};
  for (const auto& t : f.terms) out.terms.push_back({r(t.coeff), {r(t.form[0]), r(t.form[1]), r(t.form[2])}});
  return out;
}

InterpolationData<Fp> reduce(const InterpolationData<Q>& d, const PrimeField& field) {
  auto r = [&](const Q& q) { return Fp(field, q.get_num().get_si()); };
  InterpolationData<Fp> out;
  for (const auto& b : d.b) out.b.push_back(r(b));
  out.lambda = r(d.lambda);
  out.mu = r(d.mu);
  out.c = r(d.c);
  return out;
}

}  // namespace

TEST(Covariants, MonomialOrder) {
  EXPECT_EQ(ternary_dim(4), 15u);
  const auto exps = monomial_exponents(2);
  const std::vector<std::array<int, 3>> expected{{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  EXPECT_EQ(exps, expected);
  for (std::size_t m = 0; m < exps.size(); ++m) EXPECT_EQ(monomial_index(2, exps[m][0], exps[m][1]), m);
}

TEST(Covariants, InterpolationWeights) {
  const auto w = interp_weights<Q>({Q(0), Q(1)}, Q(2));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], Q(-1));
  EXPECT_EQ(w[1], Q(2));
  EXPECT_THROW(interp_weights<Q>({Q(0), Q(1), Q(0)}, Q(2)), DuplicateNode);
  EXPECT_THROW(interp_weights<Q>({Q(0), Q(1)}, Q(1)), CollidingC);
  EXPECT_THROW(interp_weights<Q>({Q(0), Q(1)}, Q(1)), InvalidInput);

  std::mt19937_64 rng(2);
  for (int k = 1; k <= 9; ++k) {
    const auto data = random_interp(rng, k);
    const auto p = interp_weights(data.b, data.c);
    // exact for every power below K
    for (int e = 0; e < k; ++e) {
      Q lhs = 0, ce = 1;
      for (int r = 0; r < e; ++r) ce *= data.c;
      for (std::size_t i = 0; i < p.size(); ++i) {
        Q be = 1;
        for (int r = 0; r < e; ++r) be *= data.b[i];
        lhs += p[i] * be;
      }
      EXPECT_EQ(lhs, ce) << "K=" << k << " e=" << e;
    }
  }
}

TEST(Covariants, BracketInvariant) {
  const LinForm<Q> x1{Q(1), Q(0), Q(0)}, x2{Q(0), Q(1), Q(0)}, x3{Q(0), Q(0), Q(1)}, s{Q(1), Q(1), Q(1)};
  EXPECT_EQ(bracket(x1, x2, x3), Q(1));
  EXPECT_EQ(bracket_I(x1, x2, x3, s), Q(-1));
  const LinForm<Q> twice{Q(2), Q(0), Q(0)};
  EXPECT_EQ(bracket_I(x1, twice, x3, s), Q(0));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<LinForm<Q>, 4> f{random_form(rng), random_form(rng), random_form(rng), random_form(rng)};
    const Q base = bracket_I(f[0], f[1], f[2], f[3]);
    std::array<int, 4> perm{0, 1, 2, 3};
    int count = 0;
    do {
      EXPECT_EQ(bracket_I(f[static_cast<std::size_t>(perm[0])], f[static_cast<std::size_t>(perm[1])],
                          f[static_cast<std::size_t>(perm[2])], f[static_cast<std::size_t>(perm[3])]),
                base);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(count, 24);

    const Mat3 a = random_invertible(rng);
    const Q dt = det(a);
    EXPECT_EQ(bracket_I(pull_back(a, f[0]), pull_back(a, f[1]), pull_back(a, f[2]), pull_back(a, f[3])),
              dt * dt * dt * dt * base);
  }
}

TEST(Covariants, FiberElementIsDivisibleByNodePower) {
  std::mt19937_64 rng(4);
  for (int k : {2, 5, 7}) {
    const auto data = random_interp(rng, k);
    const auto fc = build_fc(data, k + 3);
    EXPECT_EQ(fc.terms.size(), static_cast<std::size_t>(k) + 1);
    const auto dense = expand(fc);
    EXPECT_TRUE(divisible_by_x1_power(dense, k));
    EXPECT_FALSE(divisible_by_x1_power(dense, k + 1));
  }
  const auto data = random_interp(rng, 6);
  EXPECT_THROW(build_fc(data, 6), InvalidInput);
  auto flat = data;
  flat.lambda = 0;
  flat.mu = 0;
  EXPECT_THROW(build_fc(flat, 8), InvalidInput);
}

TEST(Covariants, DegenerateInputsGiveZero) {
  std::mt19937_64 rng(5);
  const auto single = random_sum(rng, 7, 1);
  const auto zero = zero_form(4, Q(0));
  EXPECT_EQ(cov_quad(single, 2, 1), zero);
  EXPECT_EQ(cov_quad_ordered(single, 2, 1), zero);
  // every form of f(c) lies in one pencil
  const auto fc = build_fc(random_interp(rng, 6), 7);
  EXPECT_EQ(cov_quad(fc, 2, 1), zero);
  EXPECT_THROW(cov_quad(single, 2, 2), InvalidInput);
}

TEST(Covariants, OrderedAndIncreasingSumsAgree) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = random_sum(rng, 7, 6);
    EXPECT_EQ(cov_quad(f, 2, 1), cov_quad_ordered(f, 2, 1));
    const auto g = random_sum(rng, 8, 6);
    EXPECT_EQ(cov_quad(g, 2, 2), cov_quad_ordered(g, 2, 2));
  }
}

TEST(Covariants, Equivariance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = random_sum(rng, 7, 6);
    const Mat3 a = random_invertible(rng);
    PowerSumForm<Q> moved = f;
    for (auto& t : moved.terms) t.form = pull_back(a, t.form);
    const auto lhs = cov_quad(moved, 2, 1);
    const auto rhs = cov_quad(f, 2, 1);
    ASSERT_NE(rhs, zero_form(4, Q(0)));
    Q scale = 1;
    for (int r = 0; r < 8; ++r) scale *= det(a);  // det^(4n)
    for (int probe = 0; probe < 5; ++probe) {
      const std::array<Q, 3> x{small(rng), small(rng), small(rng)};
      EXPECT_EQ(evaluate(lhs, x), scale * evaluate(rhs, apply(a, x)));
    }
  }
}

TEST(Covariants, FiberFormulaMatchesFullSum) {
  std::mt19937_64 rng(8);
  struct Shape {
    int n, w, k;
  };
  for (const Shape s : {Shape{2, 1, 6}, Shape{2, 2, 7}}) {
    const int d = 3 * s.n + s.w;
    for (int trial = 0; trial < 2; ++trial) {
      const auto data = random_interp(rng, s.k);
      const auto g = random_sum(rng, d, 5);
      const auto full = cov_quad_ordered(join(build_fc(data, d), g), s.n, s.w);
      EXPECT_EQ(eval_cov_fiber(data, g, s.n, s.w), full) << "n=" << s.n << " w=" << s.w;
    }
  }
}

TEST(Covariants, UnitCrossMultiplicityIsNotAGlobalScalar) {
  std::mt19937_64 rng(9);
  const auto data = random_interp(rng, 6);
  const auto g = random_sum(rng, 7, 5);
  const auto full = cov_quad_ordered(join(build_fc(data, 7), g), 2, 1);
  const auto unit = eval_cov_fiber(data, g, 2, 1, 1);
  ASSERT_NE(unit, full);
  std::size_t pivot = 0;
  while (pivot < unit.coeffs.size() && unit.coeffs[pivot] == 0) ++pivot;
  ASSERT_LT(pivot, unit.coeffs.size());
  const Q ratio = full.coeffs[pivot] / unit.coeffs[pivot];
  bool proportional = true;
  for (std::size_t m = 0; m < unit.coeffs.size(); ++m) proportional &= full.coeffs[m] == ratio * unit.coeffs[m];
  EXPECT_FALSE(proportional);
}

TEST(Covariants, FiberFormulaNeedsEnoughNodes) {
  std::mt19937_64 rng(10);
  const auto g = random_sum(rng, 7, 5);
  EXPECT_THROW(eval_cov_fiber(random_interp(rng, 5), g, 2, 1), InvalidInput);
  EXPECT_THROW(eval_cov_fiber(random_interp(rng, 7), g, 2, 1), InvalidInput);
}

TEST(Covariants, FastEvaluatorMatchesExactFormula) {
  const PrimeField field(kDefaultPrime);
  std::mt19937_64 rng(11);
  struct Shape {
    int n, w, k;
  };
  for (const Shape s : {Shape{2, 1, 6}, Shape{2, 2, 7}}) {
    const int d = 3 * s.n + s.w;
    const auto g = random_sum(rng, d, 8);
    const auto gp = reduce(g, field);
    const FiberEvaluator ev(field, gp, s.n, s.w);
    EXPECT_EQ(ev.base(), values(cov_quad(gp, s.n, s.w)));
    for (int trial = 0; trial < 3; ++trial) {
      const auto data = random_interp(rng, s.k);
      const auto dp = reduce(data, field);
      const auto fast = ev.evaluate(dp);
      EXPECT_EQ(fast, values(eval_cov_fiber(dp, gp, s.n, s.w)));
      EXPECT_EQ(fast, values(cov_quad(join(build_fc(dp, d), gp), s.n, s.w)));
    }
  }
}

TEST(Covariants, CaseSelection) {
  const auto s = covariant_case(19);
  EXPECT_EQ(s.tag, 'S');
  EXPECT_EQ(s.n, 6);
  EXPECT_EQ(s.k_nodes, 15);
  EXPECT_EQ(s.target, 15u);
  const auto t = covariant_case(35);
  EXPECT_EQ(t.tag, 'T');
  EXPECT_EQ(t.n, 11);
  EXPECT_EQ(t.w, 2);
  EXPECT_EQ(t.k_nodes, 27);
  EXPECT_EQ(t.target, 45u);
  for (int d : {16, 18, 20, 32, 33}) EXPECT_THROW(covariant_case(d), InvalidInput) << d;
}

TEST(Covariants, SpanCheck) {
  SpanOptions opts;
  opts.d = 19;
  const auto a = span_check(opts);
  EXPECT_EQ(a.status, Status::Pass);
  EXPECT_EQ(a.rank, 15u);
  EXPECT_EQ(a.samples, 30u);
  opts.threads = 3;
  auto ja = to_json(a), jb = to_json(span_check(opts));
  ja.erase("wallSeconds");
  jb.erase("wallSeconds");
  EXPECT_EQ(ja, jb);

  SpanOptions t;
  t.d = 35;
  const auto rt = span_check(t);
  EXPECT_EQ(rt.status, Status::Pass);
  EXPECT_EQ(rt.rank, 45u);
  EXPECT_EQ(rt.case_tag, 'T');

  SpanOptions bad;
  bad.d = 20;
  EXPECT_THROW(span_check(bad), InvalidInput);
  bad.d = 19;
  bad.samples = 14;
  EXPECT_THROW(span_check(bad), InvalidInput);
  bad.samples.reset();
  bad.g_terms = 3;
  EXPECT_THROW(span_check(bad), InvalidInput);
}
