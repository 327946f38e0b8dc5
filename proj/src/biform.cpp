#include "ratcert/biform.hpp"

#include "ratcert/errors.hpp"

namespace ratcert {
namespace {

int total(const std::array<std::uint16_t, 3>& x) { return x[0] + x[1] + x[2]; }

Rational ipow(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Multinomial expansion of (sum_i w_i t_i)^n as exponent triples.
std::map<std::array<std::uint16_t, 3>, Rational> linear_power(const QVec3& w, int n) {
  std::map<std::array<std::uint16_t, 3>, Rational> out;
  mpz_class n_fact;
  mpz_fac_ui(n_fact.get_mpz_t(), static_cast<unsigned long>(n));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const int k = n - i - j;
      mpz_class fi, fj, fk;
      mpz_fac_ui(fi.get_mpz_t(), static_cast<unsigned long>(i));
      mpz_fac_ui(fj.get_mpz_t(), static_cast<unsigned long>(j));
      mpz_fac_ui(fk.get_mpz_t(), static_cast<unsigned long>(k));
      Rational c(mpz_class(n_fact / (fi * fj * fk)));
      c *= ipow(w[0], i) * ipow(w[1], j) * ipow(w[2], k);
      if (c != 0) {
        out[{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
             static_cast<std::uint16_t>(k)}] = c;
      }
    }
  }
  return out;
}

}  // namespace

BiForm::BiForm(int s_degree, int d_degree) : s_degree_(s_degree), d_degree_(d_degree) {}

void BiForm::add(const BiMonomial& m, const Rational& c) {
  if (total(m.s) != s_degree_ || total(m.d) != d_degree_) {
    throw InvalidInput("monomial does not match the bidegree of the form");
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational BiForm::coefficient(const BiMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

BiForm& BiForm::operator+=(const BiForm& o) {
  if (o.s_degree_ != s_degree_ || o.d_degree_ != d_degree_) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    throw InvalidInput("adding forms of different bidegree");
  }
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

BiForm& BiForm::operator-=(const BiForm& o) {
  BiForm neg = o;
  neg *= Rational(-1);
  return *this += neg;
}

BiForm& BiForm::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Rational BiForm::evaluate(const QVec3& p, const QVec3& q) const {
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < 3; ++i) t *= ipow(p[i], m.s[i]) * ipow(q[i], m.d[i]);
    sum += t;
  }
  return sum;
}

BiForm BiForm::pure_power(const QVec3& u, int a, const QVec3& v, int b) {
  BiForm out(a, b);
  const auto left = linear_power(u, a);
  const auto right = linear_power(v, b);
  for (const auto& [ms, cs] : left) {
    for (const auto& [md, cd] : right) out.add({ms, md}, cs * cd);
  }
  return out;
}

BiForm contract(const BiForm& t) {
  BiForm out(t.s_degree() - 1, t.d_degree() - 1);
  if (t.s_degree() < 1 || t.d_degree() < 1) return out;
  for (const auto& [m, c] : t.terms()) {
    for (int i = 0; i < 3; ++i) {
      if (m.s[i] == 0 || m.d[i] == 0) continue;
      BiMonomial r = m;
      const long factor = static_cast<long>(m.s[i]) * m.d[i];
      --r.s[i];
      --r.d[i];
      out.add(r, c * factor);
    }
  }
  return out;
}

BiForm multiply_identity(const BiForm& t) {
  BiForm out(t.s_degree() + 1, t.d_degree() + 1);
  for (const auto& [m, c] : t.terms()) {
    for (int i = 0; i < 3; ++i) {
      BiMonomial r = m;
      ++r.s[i];
      ++r.d[i];
      out.add(r, c);
    }
  }
  return out;
}

}  // namespace ratcert
