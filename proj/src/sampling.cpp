#include "ratcert/sampling.hpp"

namespace ratcert {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::string_view label)
    : key_(mix64(mix64(seed + kGolden) ^ fnv1a(label))) {}

std::uint64_t SampleStream::word(std::uint64_t k) const noexcept {
  return mix64(key_ + (k + 1) * kGolden);
}

Elem SampleStream::element(std::uint64_t k, const PrimeField& f) const noexcept {
  return static_cast<Elem>((static_cast<unsigned __int128>(word(k)) * f.modulus()) >> 64);
}

Vec3 SampleStream::vec3(std::uint64_t k, const PrimeField& f) const noexcept {
  return {element(3 * k, f), element(3 * k + 1, f), element(3 * k + 2, f)};
}

Elem SampleCursor::next() { return stream_.element(pos_++, *field_); }

Elem SampleCursor::next_nonzero() {
  for (;;) {
    const Elem x = next();
    if (x != 0) return x;
    ++skips_;
  }
}

Vec3 SampleCursor::next_vec3() {
  Vec3 v;
  for (auto& x : v) x = next();
  return v;
}

Vec3 SampleCursor::next_nonzero_vec3() {
  for (;;) {
    const Vec3 v = next_vec3();
    if (v[0] != 0 || v[1] != 0 || v[2] != 0) return v;
    ++skips_;
  }
}

}  // namespace ratcert
