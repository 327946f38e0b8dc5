#pragma once

// Finite-field evaluation of psi(u^e (x) v^f) at a point pair through a
// lookup table of the dehomogenized chi polynomial.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ratcert/field.hpp"
#include "ratcert/projops.hpp"

namespace ratcert {

/// A covector p (evaluates the S side) and a vector q (evaluates the D side).
struct PointPair {
  Vec3 pcov{};
  Vec3 qvec{};
};

/// values[z] = chi(z, 1) mod p for every z in GF(p); lead = chi(1, 0).
/// Then chi(x, y) = y^e values[x / y] for y != 0 and chi(x, 0) = lead x^e.
struct ChiTable {
  std::uint64_t p = 0;
  int e = 0;
  int f = 0;
  std::vector<Elem> values;
  Elem lead = 0;

  bool operator==(const ChiTable&) const = default;
};

/// Throws BadPrime if p divides a coefficient denominator.
Elem reduce_rational(const Rational& q, const PrimeField& field);

/// Throws BadPrime if p <= f or p divides a denominator of chi.
ChiTable reduce_chi(const ChiPoly& chi, const PrimeField& field);

/// Horner evaluation of chi(x, y) mod p, without the table.
Elem eval_chi_direct(const std::vector<Elem>& coeffs, Elem x, Elem y, const PrimeField& field);

/// v(q)^(f-e) chi(<p,q> v(u), u(p) v(q)).
Elem eval_psi(const Vec3& u, const Vec3& v, const PointPair& pt, const ChiTable& table,
              const PrimeField& field);

/// Binary cache: "CHIT", u32 version, u64 p, u32 e, u32 f, then p+1
/// little-endian u64 values (the table followed by lead).
void write_chi_table(const ChiTable& table, const std::filesystem::path& path);
ChiTable read_chi_table(const std::filesystem::path& path);

}  // namespace ratcert
