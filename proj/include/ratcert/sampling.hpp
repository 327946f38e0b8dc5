#pragma once

#include <cstdint>
#include <string_view>

#include "ratcert/field.hpp"

namespace ratcert {

/// Counter-based keyed generator. Word k of the stream (seed, label) is a pure
/// function of (seed, label, k), so any element can be produced without
/// generating its predecessors and parallel fills are reproducible.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::string_view label);

  std::uint64_t word(std::uint64_t k) const noexcept;
  Elem element(std::uint64_t k, const PrimeField& f) const noexcept;
  /// Words 3k, 3k+1, 3k+2.
  Vec3 vec3(std::uint64_t k, const PrimeField& f) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential reader over a stream that skips degenerate draws and counts
/// them, so a run is reproducible from (seed, label) alone.
class SampleCursor {
 public:
  SampleCursor(const SampleStream& stream, const PrimeField& field)
      : stream_(stream), field_(&field) {}

  Elem next();
  Elem next_nonzero();
  Vec3 next_vec3();
  Vec3 next_nonzero_vec3();

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t skips() const noexcept { return skips_; }

 private:
  SampleStream stream_;
  const PrimeField* field_;
  std::uint64_t pos_ = 0;
  std::uint64_t skips_ = 0;
};

}  // namespace ratcert
