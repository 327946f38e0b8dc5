#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ratcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The prime cannot carry the requested computation (it divides a
/// denominator, or is too small for the degrees involved).
class BadPrime : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t bytes)
      : Error(what + " (" + std::to_string(bytes) + " bytes)"), bytes_(bytes) {}
  std::size_t attempted_bytes() const noexcept { return bytes_; }

 private:
  std::size_t bytes_;
};

class CorruptCheckpoint : public Error {
 public:
  CorruptCheckpoint(const std::string& what, std::uint64_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// An internal consistency check failed. Never expected in a correct build.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratcert
