#pragma once

// Bihomogeneous polynomials in S^a (x) D^b with exact rational coefficients.
// The S factor is a polynomial in e1, e2, e3; the D factor in x1, x2, x3.

#include <array>
#include <compare>
#include <cstdint>
#include <map>

#include <gmpxx.h>

namespace ratcert {

using Rational = mpq_class;
using QVec3 = std::array<Rational, 3>;

struct BiMonomial {
  std::array<std::uint16_t, 3> s{};  // exponents of e1, e2, e3
  std::array<std::uint16_t, 3> d{};  // exponents of x1, x2, x3
  auto operator<=>(const BiMonomial&) const = default;
};

class BiForm {
 public:
  BiForm(int s_degree, int d_degree);

  int s_degree() const noexcept { return s_degree_; }
  int d_degree() const noexcept { return d_degree_; }
  const std::map<BiMonomial, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Adds c to the coefficient of m. Throws InvalidInput on a bidegree mismatch.
  void add(const BiMonomial& m, const Rational& c);
  Rational coefficient(const BiMonomial& m) const;

  BiForm& operator+=(const BiForm& o);
  BiForm& operator-=(const BiForm& o);
  BiForm& operator*=(const Rational& c);
  friend BiForm operator+(BiForm a, const BiForm& b) { return a += b; }
  friend BiForm operator-(BiForm a, const BiForm& b) { return a -= b; }
  friend BiForm operator*(const Rational& c, BiForm a) { return a *= c; }
  friend bool operator==(const BiForm& a, const BiForm& b) {
    return a.s_degree_ == b.s_degree_ && a.d_degree_ == b.d_degree_ && a.terms_ == b.terms_;
  }

  /// Value at (p, q): e_i -> p_i, x_i -> q_i.
  Rational evaluate(const QVec3& p, const QVec3& q) const;

  /// u^a (x) v^b expanded into monomials.
  static BiForm pure_power(const QVec3& u, int a, const QVec3& v, int b);

 private:
  int s_degree_;
  int d_degree_;
  std::map<BiMonomial, Rational> terms_;
};

/// The contraction sum_i d/de_i (x) d/dx_i : S^a (x) D^b -> S^{a-1} (x) D^{b-1}.
/// Maps bidegrees with a = 0 or b = 0 to the zero form of bidegree (a-1, b-1).
BiForm contract(const BiForm& t);

/// Multiplication by the identity tensor sum_i e_i (x) x_i.
BiForm multiply_identity(const BiForm& t);

}  // namespace ratcert
