#include "ratcert/covariants.hpp"

#include <chrono>
#include <type_traits>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ratcert/parallel.hpp"
#include "ratcert/ranklab.hpp"

namespace ratcert::cov {
namespace {

using Clock = std::chrono::steady_clock;

Rational scalar(const Rational&, long v) { return Rational(v); }
Fp scalar(const Fp& like, long v) { return Fp(like.field(), v); }

template <class S>
bool is_zero(const S& x) {
  return x == zero_like(x);
}

template <class S>
S ipow(S x, int k) {
  S y = one_like(x);
  while (k > 0) {
    if (k & 1) y *= x;
    x *= x;
    k >>= 1;
  }
  return y;
}

template <class S>
const S& like_of(const PowerSumForm<S>& f) {
  if (f.terms.empty()) throw InvalidInput("power sum has no terms");
  return f.terms.front().coeff;
}

void check_nw(int degree, int n, int w) {
  if (w != 1 && w != 2) throw InvalidInput("w must be 1 or 2");
  if (n < 0 || degree != 3 * n + w) {
    throw InvalidInput("degree " + std::to_string(degree) + " does not equal 3n + w = " + std::to_string(3 * n + w));
  }
}

// c * (L1 L2 L3 L4)^w added into acc.
template <class S>
void add_product(TernaryForm<S>& acc, const std::type_identity_t<S>& c,
                 std::initializer_list<const LinForm<S>*> forms, int w) {
  TernaryForm<S> p{0, {c}};
  for (const auto* l : forms) {
    for (int r = 0; r < w; ++r) p = mul_linear(p, *l);
  }
  for (std::size_t m = 0; m < acc.coeffs.size(); ++m) acc.coeffs[m] += p.coeffs[m];
}

}  // namespace

std::size_t ternary_dim(int degree) {
  if (degree < 0) throw InvalidInput("negative degree");
  const auto g = static_cast<std::size_t>(degree);
  return (g + 1) * (g + 2) / 2;
}

std::size_t monomial_index(int degree, int i, int j) {
  const auto r = static_cast<std::size_t>(degree - i);
  return r * (r + 1) / 2 + static_cast<std::size_t>(degree - i - j);
}

std::vector<std::array<int, 3>> monomial_exponents(int degree) {
  std::vector<std::array<int, 3>> out;
  out.reserve(ternary_dim(degree));
  for (int i = degree; i >= 0; --i) {
    for (int j = degree - i; j >= 0; --j) out.push_back({i, j, degree - i - j});
  }
  return out;
}

template <class S>
TernaryForm<S> zero_form(int degree, const S& like) {
  return {degree, std::vector<S>(ternary_dim(degree), zero_like(like))};
}

template <class S>
TernaryForm<S> mul_linear(const TernaryForm<S>& f, const LinForm<S>& l) {
  const int g = f.degree;
  TernaryForm<S> out = zero_form(g + 1, l[0]);
  std::size_t idx = 0;
  for (int i = g; i >= 0; --i) {
    for (int j = g - i; j >= 0; --j, ++idx) {
      const S& c = f.coeffs[idx];
      if (is_zero(c)) continue;
      out.coeffs[monomial_index(g + 1, i + 1, j)] += l[0] * c;
      out.coeffs[monomial_index(g + 1, i, j + 1)] += l[1] * c;
      out.coeffs[monomial_index(g + 1, i, j)] += l[2] * c;
    }
  }
  return out;
}

template <class S>
TernaryForm<S> expand(const PowerSumForm<S>& f) {
  TernaryForm<S> out = zero_form(f.degree, like_of(f));
  for (const auto& t : f.terms) {
    TernaryForm<S> p{0, {t.coeff}};
    for (int r = 0; r < f.degree; ++r) p = mul_linear(p, t.form);
    for (std::size_t m = 0; m < out.coeffs.size(); ++m) out.coeffs[m] += p.coeffs[m];
  }
  return out;
}

template <class S>
std::vector<S> interp_weights(const std::vector<S>& b, const S& c) {
  if (b.empty()) throw InvalidInput("no interpolation nodes");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == c) throw CollidingC("c equals node " + std::to_string(i));
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      if (b[i] == b[j]) throw DuplicateNode("nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    }
  }
  std::vector<S> out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    S num = one_like(c);
    S den = one_like(c);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (j == i) continue;
      num *= c - b[j];
      den *= b[i] - b[j];
    }
    out.push_back(num / den);
  }
  return out;
}

template <class S>
PowerSumForm<S> build_fc(const InterpolationData<S>& data, int d) {
  const auto k = static_cast<int>(data.b.size());
  if (d <= k) throw InvalidInput("build_fc needs d > K (d = " + std::to_string(d) + ", K = " + std::to_string(k) + ")");
  if (is_zero(data.lambda) && is_zero(data.mu)) throw InvalidInput("lambda and mu are both zero");
  const auto weights = interp_weights(data.b, data.c);
  PowerSumForm<S> out{d, {}};
  out.terms.reserve(data.b.size() + 1);
  for (std::size_t i = 0; i < data.b.size(); ++i) out.terms.push_back({weights[i], {data.b[i], data.lambda, data.mu}});
  out.terms.push_back({-one_like(data.c), {data.c, data.lambda, data.mu}});
  return out;
}

template <class S>
bool divisible_by_x1_power(const TernaryForm<S>& f, int k) {
  std::size_t idx = 0;
  for (int i = f.degree; i >= 0; --i) {
    for (int j = f.degree - i; j >= 0; --j, ++idx) {
      if (i < k && !is_zero(f.coeffs[idx])) return false;
    }
  }
  return true;
}

template <class S>
S bracket(const LinForm<S>& a, const LinForm<S>& b, const LinForm<S>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

template <class S>
S bracket_I(const LinForm<S>& a, const LinForm<S>& b, const LinForm<S>& c, const LinForm<S>& d) {
  return bracket(a, b, c) * bracket(a, b, d) * bracket(a, c, d) * bracket(b, c, d);
}

template <class S>
TernaryForm<S> cov_quad_ordered(const PowerSumForm<S>& f, int n, int w) {
  check_nw(f.degree, n, w);
  TernaryForm<S> out = zero_form(4 * w, like_of(f));
  const auto& t = f.terms;
  for (const auto& t1 : t) {
    for (const auto& t2 : t) {
      for (const auto& t3 : t) {
        for (const auto& t4 : t) {
          const S i = bracket_I(t1.form, t2.form, t3.form, t4.form);
          if (is_zero(i)) continue;
          add_product(out, t1.coeff * t2.coeff * t3.coeff * t4.coeff * ipow(i, n),
                      {&t1.form, &t2.form, &t3.form, &t4.form}, w);
        }
      }
    }
  }
  return out;
}

template <class S>
TernaryForm<S> cov_quad(const PowerSumForm<S>& f, int n, int w) {
  check_nw(f.degree, n, w);
  const S& like = like_of(f);
  TernaryForm<S> out = zero_form(4 * w, like);
  const S orderings = scalar(like, 24);
  const auto& t = f.terms;
  const std::size_t m = t.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      for (std::size_t c = b + 1; c < m; ++c) {
        for (std::size_t d = c + 1; d < m; ++d) {
          const S i = bracket_I(t[a].form, t[b].form, t[c].form, t[d].form);
          if (is_zero(i)) continue;
          add_product(out, orderings * t[a].coeff * t[b].coeff * t[c].coeff * t[d].coeff * ipow(i, n),
                      {&t[a].form, &t[b].form, &t[c].form, &t[d].form}, w);
        }
      }
    }
  }
  return out;
}

template <class S>
TernaryForm<S> eval_cov_fiber(const InterpolationData<S>& data, const PowerSumForm<S>& g, int n, int w,
                              int cross_multiplicity) {
  check_nw(g.degree, n, w);
  const auto k = static_cast<int>(data.b.size());
  if (k <= 2 * n + w) {
    throw InvalidInput("fiber formula needs K > 2n + w (K = " + std::to_string(k) + ", n = " + std::to_string(n) +
                       ", w = " + std::to_string(w) + ")");
  }
  if (g.degree <= k) throw InvalidInput("fiber formula needs d > K");
  if (is_zero(data.lambda) && is_zero(data.mu)) throw InvalidInput("lambda and mu are both zero");
  const S& like = like_of(g);
  const auto weights = interp_weights(data.b, data.c);

  TernaryForm<S> out = zero_form(4 * w, like);
  for (std::size_t i = 0; i < data.b.size(); ++i) {
    const LinForm<S> l{data.b[i], data.lambda, data.mu};
    for (const auto& tj : g.terms) {
      for (const auto& tk : g.terms) {
        for (const auto& tq : g.terms) {
          const S br = bracket_I(l, tj.form, tk.form, tq.form);
          if (is_zero(br)) continue;
          add_product(out, weights[i] * tj.coeff * tk.coeff * tq.coeff * ipow(br, n),
                      {&l, &tj.form, &tk.form, &tq.form}, w);
        }
      }
    }
  }
  const S mult = scalar(like, cross_multiplicity);
  for (auto& c : out.coeffs) c *= mult;

  PowerSumForm<S> rest{g.degree, {}};
  rest.terms.push_back({-one_like(like), {data.c, data.lambda, data.mu}});
  rest.terms.insert(rest.terms.end(), g.terms.begin(), g.terms.end());
  const auto q = cov_quad(rest, n, w);
  for (std::size_t m = 0; m < out.coeffs.size(); ++m) out.coeffs[m] += q.coeffs[m];
  return out;
}

#define RATCERT_INSTANTIATE(S)                                                                             \
  template TernaryForm<S> zero_form(int, const S&);                                                        \
  template TernaryForm<S> mul_linear(const TernaryForm<S>&, const LinForm<S>&);                            \
  template TernaryForm<S> expand(const PowerSumForm<S>&);                                                  \
  template std::vector<S> interp_weights(const std::vector<S>&, const S&);                                 \
  template PowerSumForm<S> build_fc(const InterpolationData<S>&, int);                                     \
  template bool divisible_by_x1_power(const TernaryForm<S>&, int);                                         \
  template S bracket(const LinForm<S>&, const LinForm<S>&, const LinForm<S>&);                             \
  template S bracket_I(const LinForm<S>&, const LinForm<S>&, const LinForm<S>&, const LinForm<S>&);        \
  template TernaryForm<S> cov_quad_ordered(const PowerSumForm<S>&, int, int);                              \
  template TernaryForm<S> cov_quad(const PowerSumForm<S>&, int, int);                                      \
  template TernaryForm<S> eval_cov_fiber(const InterpolationData<S>&, const PowerSumForm<S>&, int, int, int);

RATCERT_INSTANTIATE(Fp)
RATCERT_INSTANTIATE(Rational)
#undef RATCERT_INSTANTIATE

// --- cases ------------------------------------------------------------------

CovariantCase covariant_case(int d) {
  CovariantCase c;
  c.d = d;
  if (d % 3 == 1 && d >= 19) {
    c.tag = 'S';
    c.n = (d - 1) / 3;
    c.w = 1;
    c.k_nodes = 2 * c.n + 3;
    c.target = 15;
  } else if (d % 3 == 2 && d >= 35) {
    c.tag = 'T';
    c.n = (d - 2) / 3;
    c.w = 2;
    c.k_nodes = 2 * c.n + 5;
    c.target = 45;
  } else {
    throw InvalidInput("covariant check needs d = 1 (mod 3) with d >= 19 or d = 2 (mod 3) with d >= 35, got " +
                       std::to_string(d));
  }
  return c;
}

// --- fast fiber evaluation --------------------------------------------------

FiberEvaluator::FiberEvaluator(const PrimeField& field, const PowerSumForm<Fp>& g, int n, int w)
    : field_(field), n_(n), w_(w), terms_(g.terms.size()) {
  check_nw(g.degree, n, w);
  const PrimeField& f = field_;
  std::vector<Vec3> m(terms_);
  std::vector<Elem> a(terms_);
  for (std::size_t j = 0; j < terms_; ++j) {
    a[j] = g.terms[j].coeff.value();
    for (int r = 0; r < 3; ++r) m[j][static_cast<std::size_t>(r)] = g.terms[j].form[static_cast<std::size_t>(r)].value();
  }
  std::vector<std::uint32_t> pair_id(terms_ * terms_, 0);
  for (std::size_t j = 0; j < terms_; ++j) {
    for (std::size_t k = j + 1; k < terms_; ++k) {
      pair_id[j * terms_ + k] = static_cast<std::uint32_t>(pair_cross_.size());
      const Vec3& x = m[j];
      const Vec3& y = m[k];
      pair_cross_.push_back({f.sub(f.mul(x[1], y[2]), f.mul(x[2], y[1])), f.sub(f.mul(x[2], y[0]), f.mul(x[0], y[2])),
                             f.sub(f.mul(x[0], y[1]), f.mul(x[1], y[0]))});
    }
  }
  const Fp six(field, 6);
  for (std::size_t j = 0; j < terms_; ++j) {
    for (std::size_t k = j + 1; k < terms_; ++k) {
      for (std::size_t q = k + 1; q < terms_; ++q) {
        const Elem br = f.dot(m[j], pair_cross_[pair_id[k * terms_ + q]]);
        if (br == 0) continue;
        triples_.push_back({pair_id[j * terms_ + k], pair_id[j * terms_ + q], pair_id[k * terms_ + q], br});
        TernaryForm<Fp> p{0, {six * g.terms[j].coeff * g.terms[k].coeff * g.terms[q].coeff}};
        for (const auto* l : {&g.terms[j].form, &g.terms[k].form, &g.terms[q].form}) {
          for (int r = 0; r < w; ++r) p = mul_linear(p, *l);
        }
        for (const auto& c : p.coeffs) triple_poly_.push_back(c.value());
      }
    }
  }
  for (const auto& c : cov_quad(g, n, w).coeffs) base_.push_back(c.value());
}

std::vector<Elem> FiberEvaluator::cross(const Vec3& l) const {
  const PrimeField& f = field_;
  const std::size_t dim = ternary_dim(3 * w_);
  const std::uint64_t limit = f.max_accumulation();
  std::vector<Elem> pb(pair_cross_.size());
  for (std::size_t i = 0; i < pb.size(); ++i) pb[i] = f.dot(l, pair_cross_[i]);

  std::array<std::uint64_t, 28> acc{};
  std::uint64_t count = 0;
  const Elem* poly = triple_poly_.data();
  for (std::size_t t = 0; t < triples_.size(); ++t, poly += dim) {
    const Triple& tr = triples_[t];
    const Elem i = f.mul(f.mul(pb[tr.jk], pb[tr.jq]), f.mul(pb[tr.kq], tr.bracket));
    if (i == 0) continue;
    if (count == limit) {
      for (std::size_t m = 0; m < dim; ++m) acc[m] = f.reduce(acc[m]);
      count = 0;
    }
    const std::uint64_t c = f.pow(i, static_cast<std::uint64_t>(n_));
    for (std::size_t m = 0; m < dim; ++m) acc[m] += c * poly[m];
    ++count;
  }

  TernaryForm<Fp> r{3 * w_, {}};
  r.coeffs.reserve(dim);
  for (std::size_t m = 0; m < dim; ++m) r.coeffs.push_back(Fp::raw(f, f.reduce(acc[m])));
  const LinForm<Fp> lf{Fp::raw(f, l[0]), Fp::raw(f, l[1]), Fp::raw(f, l[2])};
  for (int k = 0; k < w_; ++k) r = mul_linear(r, lf);
  std::vector<Elem> out;
  out.reserve(r.coeffs.size());
  for (const auto& c : r.coeffs) out.push_back(c.value());
  return out;
}

std::vector<Elem> FiberEvaluator::evaluate(const InterpolationData<Fp>& data) const {
  const PrimeField& f = field_;
  const auto k = static_cast<int>(data.b.size());
  if (k <= 2 * n_ + w_) throw InvalidInput("fiber formula needs K > 2n + w");
  if (3 * n_ + w_ <= k) throw InvalidInput("fiber formula needs d > K");
  if (data.lambda.is_zero() && data.mu.is_zero()) throw InvalidInput("lambda and mu are both zero");
  const auto weights = interp_weights(data.b, data.c);
  std::vector<Elem> out(base_.size(), 0);
  auto add_scaled = [&](Elem s, const Vec3& l) {
    const auto x = cross(l);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = f.add(out[m], f.mul(s, x[m]));
  };
  for (std::size_t i = 0; i < data.b.size(); ++i) {
    add_scaled(weights[i].value(), {data.b[i].value(), data.lambda.value(), data.mu.value()});
  }
  add_scaled(f.neg(1), {data.c.value(), data.lambda.value(), data.mu.value()});
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = f.add(f.mul(4, out[m]), base_[m]);
  return out;
}

InterpolationData<Fp> draw_interpolation(SampleCursor& cur, const PrimeField& field, int k_nodes) {
  if (k_nodes < 1 || static_cast<std::uint64_t>(k_nodes) >= field.modulus()) {
    throw InvalidInput("node count must be in [1, p)");
  }
  InterpolationData<Fp> data;
  std::unordered_set<Elem> seen;
  while (data.b.size() < static_cast<std::size_t>(k_nodes)) {
    const Elem x = cur.next();
    if (seen.insert(x).second) data.b.push_back(Fp::raw(field, x));
  }
  Elem lambda = 0, mu = 0;
  while (lambda == 0 && mu == 0) {
    lambda = cur.next();
    mu = cur.next();
  }
  data.lambda = Fp::raw(field, lambda);
  data.mu = Fp::raw(field, mu);
  Elem c = cur.next();
  while (seen.contains(c)) c = cur.next();
  data.c = Fp::raw(field, c);
  return data;
}

// --- spanning -----------------------------------------------------------------

nlohmann::json to_json(const SpanReport& r) {
  return {{"d", r.d},
          {"caseTag", std::string(1, r.case_tag)},
          {"prime", r.prime},
          {"seed", r.seed},
          {"samples", r.samples},
          {"gTerms", r.g_terms},
          {"rank", r.rank},
          {"needed", r.needed},
          {"status", to_string(r.status)},
          {"escalations", r.escalations},
          {"wallSeconds", r.wall_seconds}};
}

SpanReport span_check(const SpanOptions& opts) {
  const auto start = Clock::now();
  const CovariantCase cs = covariant_case(opts.d);
  const std::size_t samples = opts.samples.value_or(2 * cs.target);
  if (samples < cs.target) {
    throw InvalidInput("samples (" + std::to_string(samples) + ") must be at least the target dimension " +
                       std::to_string(cs.target));
  }
  if (opts.g_terms < 4) throw InvalidInput("g needs at least 4 terms");
  const PrimeField field(opts.prime);

  SpanReport rep;
  rep.d = opts.d;
  rep.case_tag = cs.tag;
  rep.prime = field.modulus();
  rep.seed = opts.seed;
  rep.samples = samples;
  rep.needed = cs.target;

  for (int esc = 0; esc <= opts.max_escalations; ++esc) {
    const std::size_t g_terms = opts.g_terms << esc;
    rep.g_terms = g_terms;
    rep.escalations = esc;

    SampleCursor gcur(SampleStream(opts.seed, "g#" + std::to_string(esc)), field);
    PowerSumForm<Fp> g{opts.d, {}};
    for (std::size_t t = 0; t < g_terms; ++t) {
      const Fp a = Fp::raw(field, gcur.next_nonzero());
      const Vec3 m = gcur.next_nonzero_vec3();
      g.terms.push_back({a, {Fp::raw(field, m[0]), Fp::raw(field, m[1]), Fp::raw(field, m[2])}});
    }
    const FiberEvaluator ev(field, g, cs.n, cs.w);

    const auto values = fill_rows(
        field, samples, cs.target,
        [&](std::size_t i, std::span<Elem> row) {
          SampleCursor cur(SampleStream(opts.seed, "fiber#" + std::to_string(esc) + "/" + std::to_string(i)), field);
          const auto data = draw_interpolation(cur, field, cs.k_nodes);
          const auto v = ev.evaluate(data);
          std::copy(v.begin(), v.end(), row.begin());
        },
        opts.threads);
    rep.rank = rank_fp(values, {.panel_width = 256, .threads = opts.threads}).rank;
    spdlog::info("stage=span d={} case={} gTerms={} samples={} rank={} needed={}", opts.d, cs.tag, g_terms, samples,
                 rep.rank, cs.target);
    if (rep.rank == cs.target) {
      rep.status = Status::Pass;
      break;
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

}  // namespace ratcert::cov
