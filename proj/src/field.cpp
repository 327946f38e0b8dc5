#include "ratcert/field.hpp"

#include <limits>

#include "ratcert/errors.hpp"

namespace ratcert {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t d : {2u, 3u, 5u, 7u}) {
    if (n % d == 0) return n == d;
  }
  for (std::uint64_t d = 11; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p < 3 || p >= (std::uint64_t{1} << 31) || !is_prime(p)) {
    throw InvalidInput("field modulus must be an odd prime below 2^31, got " + std::to_string(p));
  }
  barrett_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) / p);
  const std::uint64_t pm1 = p - 1;
  max_acc_ = (std::numeric_limits<std::uint64_t>::max() - pm1) / (pm1 * pm1);
}

Elem PrimeField::pow(Elem base, std::uint64_t exponent) const noexcept {
  Elem result = 1 % static_cast<Elem>(p_);
  while (exponent != 0) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

Elem PrimeField::inv(Elem a) const {
  if (a == 0) throw InvalidInput("inverse of zero in GF(" + std::to_string(p_) + ")");
  return pow(a, p_ - 2);
}

Elem PrimeField::from_int(std::int64_t v) const noexcept {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return static_cast<Elem>(r);
}

void PrimeField::batch_inverse(std::vector<Elem>& values) const {
  if (values.empty()) return;
  std::vector<Elem> prefix(values.size());
  Elem acc = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    prefix[i] = acc;
    acc = mul(acc, values[i]);
  }
  Elem inv_acc = inv(acc);
  for (std::size_t i = values.size(); i-- > 0;) {
    const Elem v = values[i];
    values[i] = mul(inv_acc, prefix[i]);
    inv_acc = mul(inv_acc, v);
  }
}

}  // namespace ratcert
