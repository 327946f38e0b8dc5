#pragma once

// Exact projectors of S^e (x) D^f onto its irreducible summands, written as
// polynomials sum_j mu_j delta^j Delta^j in the multiplication (delta) and
// contraction (Delta) operators, and the binary form chi through which the
// bilinear map psi evaluates on pure powers.

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratcert/biform.hpp"

namespace ratcert {

/// Projector onto V(e-i, f-i) inside S^e (x) D^f:
/// pi = sum_{j=0}^{min(e,f)} mu[j] * delta^j Delta^j.
struct ProjectorCoeffs {
  int e = 0;
  int f = 0;
  int i = 0;
  std::vector<Rational> mu;
};

/// Throws InvalidInput unless 0 <= i <= min(e, f).
ProjectorCoeffs projector_coeffs(int e, int f, int i);

/// The scalar s with Delta^i delta^i (e1^a (x) x3^b) = s * e1^a (x) x3^b,
/// obtained by symbolic expansion. This is 1/lambda_i for the summand
/// V(a, b) of S^{a+i} (x) D^{b+i}.
Rational inverse_lambda(int a, int b, int i);

/// Applies sum_j mu[j] delta^j Delta^j to t (bidegree must be (e, f)).
BiForm apply_projector(const ProjectorCoeffs& pc, const BiForm& t);

/// Degree-e binary form chi(x, y) = sum_j coeffs[j] x^j y^(e-j) with
/// psi(u^e (x) v^f)(p, q) = v(q)^(f-e) chi(<p,q> v(u), u(p) v(q)),
/// psi being the projection onto the sum of the listed summands.
struct ChiPoly {
  int e = 0;
  int f = 0;
  std::vector<int> components;
  std::vector<Rational> coeffs;
  /// Every prime dividing a coefficient denominator is at most this value.
  std::uint64_t denominator_prime_bound = 1;
};

/// Throws InvalidInput if e > f or a component index is out of range.
ChiPoly chi_poly(int e, int f, std::span<const int> components);

/// (delta^i Delta^i (u^a (x) v^b))(p, q)
///   = a!/(a-i)! b!/(b-i)! <p,q>^i v(u)^i u(p)^(a-i) v(q)^(b-i).
Rational eval_delta_power(int a, int b, int i, const QVec3& u, const QVec3& v, const QVec3& p,
                          const QVec3& q);

/// a!/(a-j)!
mpz_class falling_factorial(int a, int j);

nlohmann::json to_json(const ChiPoly& chi);
ChiPoly chi_from_json(const nlohmann::json& j);

}  // namespace ratcert
