#include "ratcert/chi_table.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "ratcert/errors.hpp"

namespace ratcert {
namespace {

constexpr std::uint32_t kChiVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_le(std::istream& is, int bytes, const std::filesystem::path& path) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), bytes)) {
    throw InvalidInput("truncated chi table file " + path.string());
  }
  std::uint64_t v = 0;
  for (int i = bytes; i-- > 0;) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

Elem reduce_rational(const Rational& q, const PrimeField& field) {
  const unsigned long p = field.modulus();
  const unsigned long den = mpz_fdiv_ui(q.get_den_mpz_t(), p);
  if (den == 0) throw BadPrime("p = " + std::to_string(p) + " divides a denominator");
  const unsigned long num = mpz_fdiv_ui(q.get_num_mpz_t(), p);
  return field.mul(static_cast<Elem>(num), field.inv(static_cast<Elem>(den)));
}

ChiTable reduce_chi(const ChiPoly& chi, const PrimeField& field) {
  if (field.modulus() <= static_cast<std::uint64_t>(chi.f)) {
    throw BadPrime("p = " + std::to_string(field.modulus()) + " must exceed f = " + std::to_string(chi.f));
  }
  std::vector<Elem> coeffs;
  coeffs.reserve(chi.coeffs.size());
  for (const auto& c : chi.coeffs) coeffs.push_back(reduce_rational(c, field));

  ChiTable t;
  t.p = field.modulus();
  t.e = chi.e;
  t.f = chi.f;
  t.lead = coeffs.back();
  t.values.resize(t.p);
  for (std::uint64_t z = 0; z < t.p; ++z) {
    Elem acc = 0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = field.add(field.mul(acc, static_cast<Elem>(z)), coeffs[j]);
    t.values[z] = acc;
  }
  return t;
}

Elem eval_chi_direct(const std::vector<Elem>& coeffs, Elem x, Elem y, const PrimeField& field) {
  // sum_j c_j x^j y^(e-j)
  const auto e = coeffs.size() - 1;
  Elem acc = 0;
  for (std::size_t j = 0; j <= e; ++j) {
    const Elem term = field.mul(coeffs[j], field.mul(field.pow(x, j), field.pow(y, e - j)));
    acc = field.add(acc, term);
  }
  return acc;
}

Elem eval_psi(const Vec3& u, const Vec3& v, const PointPair& pt, const ChiTable& table,
              const PrimeField& field) {
  const Elem vu = field.dot(v, u);
  const Elem up = field.dot(u, pt.pcov);
  const Elem vq = field.dot(v, pt.qvec);
  const Elem pq = field.dot(pt.pcov, pt.qvec);
  const Elem x = field.mul(pq, vu);
  const Elem y = field.mul(up, vq);
  const auto e = static_cast<std::uint64_t>(table.e);
  Elem chi;
  if (y != 0) {
    chi = field.mul(field.pow(y, e), table.values[field.mul(x, field.inv(y))]);
  } else {
    chi = field.mul(table.lead, field.pow(x, e));
  }
  return field.mul(field.pow(vq, static_cast<std::uint64_t>(table.f - table.e)), chi);
}

void write_chi_table(const ChiTable& table, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidInput("cannot write " + tmp);
    os.write("CHIT", 4);
    put_u32(os, kChiVersion);
    put_u64(os, table.p);
    put_u32(os, static_cast<std::uint32_t>(table.e));
    put_u32(os, static_cast<std::uint32_t>(table.f));
    for (Elem v : table.values) put_u64(os, v);
    put_u64(os, table.lead);
    if (!os) throw InvalidInput("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ChiTable read_chi_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CHIT", 4) != 0) {
    throw InvalidInput("bad chi table magic in " + path.string());
  }
  if (get_le(is, 4, path) != kChiVersion) throw InvalidInput("unsupported chi table version");
  ChiTable t;
  t.p = get_le(is, 8, path);
  t.e = static_cast<int>(get_le(is, 4, path));
  t.f = static_cast<int>(get_le(is, 4, path));
  if (!is_prime(t.p) || t.p >= (std::uint64_t{1} << 31)) throw InvalidInput("chi table has a bad modulus");
  t.values.resize(t.p);
  for (auto& v : t.values) {
    const auto x = get_le(is, 8, path);
    if (x >= t.p) throw InvalidInput("chi table entry out of range");
    v = static_cast<Elem>(x);
  }
  t.lead = static_cast<Elem>(get_le(is, 8, path));
  return t;
}

}  // namespace ratcert
