#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ratcert {

using Elem = std::uint32_t;
using Vec3 = std::array<Elem, 3>;

bool is_prime(std::uint64_t n) noexcept;

/// GF(p) for an odd prime p < 2^31. Elements are canonical residues in [0, p).
///
/// Multiplication reduces 64-bit products with a Barrett step followed by a
/// masked conditional subtraction, so the inner loops stay branch-free.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p);

  std::uint64_t modulus() const noexcept { return p_; }

  Elem reduce(std::uint64_t x) const noexcept {
    const auto q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * barrett_) >> 64);
    std::uint64_t r = x - q * p_;
    r -= p_ & (0 - static_cast<std::uint64_t>(r >= p_));
    return static_cast<Elem>(r);
  }

  Elem add(Elem a, Elem b) const noexcept {
    std::uint64_t s = std::uint64_t{a} + b;
    s -= p_ & (0 - static_cast<std::uint64_t>(s >= p_));
    return static_cast<Elem>(s);
  }
  Elem sub(Elem a, Elem b) const noexcept {
    std::uint64_t s = std::uint64_t{a} + p_ - b;
    s -= p_ & (0 - static_cast<std::uint64_t>(s >= p_));
    return static_cast<Elem>(s);
  }
  Elem neg(Elem a) const noexcept { return a == 0 ? 0 : static_cast<Elem>(p_ - a); }
  Elem mul(Elem a, Elem b) const noexcept { return reduce(std::uint64_t{a} * b); }

  Elem pow(Elem base, std::uint64_t exponent) const noexcept;
  /// Throws InvalidInput on zero.
  Elem inv(Elem a) const;
  Elem from_int(std::int64_t v) const noexcept;

  Elem dot(const Vec3& a, const Vec3& b) const noexcept {
    return reduce(std::uint64_t{a[0]} * b[0] + std::uint64_t{a[1]} * b[1] +
                  std::uint64_t{a[2]} * b[2]);
  }

  /// How many products of two residues can be added to a residue in a
  /// uint64 accumulator before it can overflow.
  std::uint64_t max_accumulation() const noexcept { return max_acc_; }

  /// Inverts every entry in place with one field inversion (Montgomery's
  /// batch trick). All entries must be nonzero.
  void batch_inverse(std::vector<Elem>& values) const;

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
  std::uint64_t barrett_;
  std::uint64_t max_acc_;
};

/// Lightweight field element with value semantics, for code that is generic
/// over the scalar type (shared with the exact-rational instantiations).
class Fp {
 public:
  Fp() = default;
  Fp(const PrimeField& f, std::int64_t v) : f_(&f), v_(f.from_int(v)) {}
  static Fp raw(const PrimeField& f, Elem v) {
    Fp x;
    x.f_ = &f;
    x.v_ = v;
    return x;
  }

  Elem value() const noexcept { return v_; }
  const PrimeField& field() const noexcept { return *f_; }
  bool is_zero() const noexcept { return v_ == 0; }

  Fp operator+(const Fp& o) const { return raw(*f_, f_->add(v_, o.v_)); }
  Fp operator-(const Fp& o) const { return raw(*f_, f_->sub(v_, o.v_)); }
  Fp operator*(const Fp& o) const { return raw(*f_, f_->mul(v_, o.v_)); }
  Fp operator/(const Fp& o) const { return raw(*f_, f_->mul(v_, f_->inv(o.v_))); }
  Fp operator-() const { return raw(*f_, f_->neg(v_)); }
  Fp& operator+=(const Fp& o) { return *this = *this + o; }
  Fp& operator-=(const Fp& o) { return *this = *this - o; }
  Fp& operator*=(const Fp& o) { return *this = *this * o; }
  friend bool operator==(const Fp& a, const Fp& b) noexcept { return a.v_ == b.v_; }

 private:
  const PrimeField* f_ = nullptr;
  Elem v_ = 0;
};

inline Fp one_like(const Fp& x) { return Fp::raw(x.field(), 1); }
inline Fp zero_like(const Fp& x) { return Fp::raw(x.field(), 0); }
inline Fp pow(const Fp& x, std::uint64_t k) { return Fp::raw(x.field(), x.field().pow(x.value(), k)); }

/// Largest primes below 2^20, tried in order when the preferred prime is
/// inadmissible for a given computation.
inline constexpr std::array<std::uint64_t, 6> kPrimeLadder = {1048573, 1048571, 1048559,
                                                              1048549, 1048517, 1048507};
inline constexpr std::uint64_t kDefaultPrime = kPrimeLadder[0];

}  // namespace ratcert
