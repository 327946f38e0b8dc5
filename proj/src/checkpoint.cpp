#include <array>
#include <cstring>
#include <fstream>

#include <boost/crc.hpp>

#include "ratcert/errors.hpp"
#include "ratcert/ranklab.hpp"

namespace ratcert {
namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kHeaderBytes = 40;

using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true>;

template <int N>
void put_le(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < N; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

template <int N>
std::uint64_t get_le(const unsigned char* in) {
  std::uint64_t v = 0;
  for (int i = N; i-- > 0;) v = (v << 8) | in[i];
  return v;
}

std::uint64_t crc64(const void* data, std::size_t n) {
  Crc64 crc;
  crc.process_bytes(data, n);
  return crc.checksum();
}

}  // namespace

void Eliminator::write_checkpoint(const std::filesystem::path& path) const {
  const std::size_t rr = work_.rows() - pivot_rows_;
  const std::size_t rc = work_.cols() - col_;

  std::array<unsigned char, kHeaderBytes + 8> header{};
  std::memcpy(header.data(), "CRKP", 4);
  put_le<4>(header.data() + 4, kCheckpointVersion);
  put_le<8>(header.data() + 8, work_.field().modulus());
  put_le<8>(header.data() + 16, orig_rows_);
  put_le<8>(header.data() + 24, orig_cols_);
  put_le<4>(header.data() + 32, panels_);
  put_le<4>(header.data() + 36, rank_so_far());
  put_le<8>(header.data() + kHeaderBytes, crc64(header.data(), kHeaderBytes));

  std::vector<unsigned char> payload(rr * rc * 4);
  for (std::size_t i = 0; i < rr; ++i) {
    const auto row = work_.row(pivot_rows_ + i);
    unsigned char* out = payload.data() + i * rc * 4;
    for (std::size_t j = 0; j < rc; ++j) put_le<4>(out + 4 * j, row[col_ + j]);
  }
  std::array<unsigned char, 8> tail{};
  put_le<8>(tail.data(), crc64(payload.data(), payload.size()));

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidInput("cannot write checkpoint " + tmp.string());
    os.write(reinterpret_cast<const char*>(header.data()), header.size());
    os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    os.write(reinterpret_cast<const char*>(tail.data()), tail.size());
    if (!os) throw InvalidInput("short write to checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Eliminator Eliminator::resume(const std::filesystem::path& path, EliminationOptions options) {
  if (options.panel_width == 0) throw InvalidInput("panel width must be positive");
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw InvalidInput("cannot open checkpoint " + path.string());
  const auto file_size = static_cast<std::uint64_t>(is.tellg());
  is.seekg(0);

  std::array<unsigned char, kHeaderBytes + 8> header{};
  if (file_size < header.size()) throw CorruptCheckpoint("truncated header", file_size);
  is.read(reinterpret_cast<char*>(header.data()), header.size());
  if (std::memcmp(header.data(), "CRKP", 4) != 0) throw CorruptCheckpoint("bad magic", 0);
  if (get_le<4>(header.data() + 4) != kCheckpointVersion) throw CorruptCheckpoint("unsupported version", 4);
  if (get_le<8>(header.data() + kHeaderBytes) != crc64(header.data(), kHeaderBytes)) {
    throw CorruptCheckpoint("header CRC mismatch", kHeaderBytes);
  }
  const std::uint64_t p = get_le<8>(header.data() + 8);
  const std::uint64_t rows = get_le<8>(header.data() + 16);
  const std::uint64_t cols = get_le<8>(header.data() + 24);
  const std::uint64_t panels = get_le<4>(header.data() + 32);
  const std::uint64_t rank = get_le<4>(header.data() + 36);
  if (rank > rows || rank > cols) throw CorruptCheckpoint("rank exceeds matrix dimensions", 36);

  const std::uint64_t used = std::min<std::uint64_t>(cols, panels * options.panel_width);
  const std::uint64_t rr = rows - rank;
  const std::uint64_t rc = cols - used;
  const std::uint64_t payload_bytes = rr * rc * 4;
  const std::uint64_t expected = header.size() + payload_bytes + 8;
  if (file_size < expected) throw CorruptCheckpoint("truncated payload", file_size);
  if (file_size > expected) {
    throw CorruptCheckpoint("file larger than header implies (panel width mismatch?)", expected);
  }

  const PrimeField field(p);
  std::vector<unsigned char> payload(payload_bytes);
  is.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  std::array<unsigned char, 8> tail{};
  is.read(reinterpret_cast<char*>(tail.data()), tail.size());
  if (!is) throw CorruptCheckpoint("short read", header.size());
  if (get_le<8>(tail.data()) != crc64(payload.data(), payload.size())) {
    throw CorruptCheckpoint("payload CRC mismatch", header.size() + payload_bytes);
  }

  DenseMatrixFp residual(field, rr, rc);
  for (std::size_t i = 0; i < rr; ++i) {
    auto row = residual.row(i);
    const unsigned char* in = payload.data() + i * rc * 4;
    for (std::size_t j = 0; j < rc; ++j) {
      const auto v = get_le<4>(in + 4 * j);
      if (v >= p) throw CorruptCheckpoint("entry out of range", header.size() + (i * rc + j) * 4);
      row[j] = static_cast<Elem>(v);
    }
  }

  Eliminator e(std::move(residual), options);
  e.orig_rows_ = rows;
  e.orig_cols_ = cols;
  e.base_rank_ = rank;
  e.base_cols_ = used;
  e.panels_ = panels;
  e.resumed_ = true;
  return e;
}

}  // namespace ratcert
