#include "ratcert/projops.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "ratcert/errors.hpp"

namespace ratcert {
namespace {

Rational ipow(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Rational dot(const QVec3& a, const QVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

BiForm highest_weight_tensor(int a, int b) {
  BiForm h(a, b);
  BiMonomial m;
  m.s[0] = static_cast<std::uint16_t>(a);
  m.d[2] = static_cast<std::uint16_t>(b);
  h.add(m, 1);
  return h;
}

// Memo tables. All access goes through cache_mutex; the recursion below runs
// with the lock held.
std::mutex cache_mutex;
std::map<std::pair<int, int>, std::vector<Rational>> lambda_cache;  // (a,b) -> s_1..s_k (cumulative)
std::map<std::pair<int, int>, std::vector<std::vector<Rational>>> projector_cache;

// Cumulative scalars s_k with Delta^k delta^k h = s_k h, for k = 1..kmax.
// Each step uses Delta(delta^k h) = c_k delta^(k-1) h on the span of the
// delta^k h, which stays small because Delta kills h.
const std::vector<Rational>& lambda_row(int a, int b, int kmax) {
  auto& row = lambda_cache[{a, b}];
  if (static_cast<int>(row.size()) >= kmax) return row;
  const int target = std::max<int>(kmax, 2 * static_cast<int>(row.size()));

  std::vector<Rational> fresh;
  fresh.reserve(static_cast<std::size_t>(target));
  BiForm previous = highest_weight_tensor(a, b);
  Rational running = 1;
  for (int k = 1; k <= target; ++k) {
    BiForm current = multiply_identity(previous);
    BiForm image = contract(current);
    const auto& [probe, probe_coeff] = *previous.terms().begin();
    const Rational c = image.coefficient(probe) / probe_coeff;
    if (!(image == c * previous)) {
      throw InternalError("contraction left the highest-weight string at k=" + std::to_string(k));
    }
    running *= c;
    fresh.push_back(running);
    previous = std::move(current);
  }
  row = std::move(fresh);
  return row;
}

const std::vector<std::vector<Rational>>& projector_rows(int e, int f);

Rational inverse_lambda_locked(int a, int b, int i) {
  if (i == 0) return 1;
  const Rational s = lambda_row(a, b, i)[static_cast<std::size_t>(i - 1)];
  // pi_{a,b} must fix the highest-weight tensor.
  ProjectorCoeffs inner{a, b, 0, projector_rows(a, b)[0]};
  const BiForm h = highest_weight_tensor(a, b);
  if (!(apply_projector(inner, h) == h)) throw InternalError("projector does not fix highest weight");
  return s;
}

const std::vector<std::vector<Rational>>& projector_rows(int e, int f) {
  auto found = projector_cache.find({e, f});
  if (found != projector_cache.end()) return found->second;

  const int m = std::min(e, f);
  const auto width = static_cast<std::size_t>(m + 1);
  std::vector<std::vector<Rational>> rows(width, std::vector<Rational>(width, Rational(0)));
  // pi_{e,f,i} = lambda_i delta^i pi_{e-i,f-i} Delta^i.
  for (int i = 1; i <= m; ++i) {
    const auto sub = projector_rows(e - i, f - i)[0];
    const Rational lambda = 1 / inverse_lambda_locked(e - i, f - i, i);
    for (std::size_t k = 0; k < sub.size(); ++k) {
      rows[static_cast<std::size_t>(i)][k + static_cast<std::size_t>(i)] = lambda * sub[k];
    }
  }
  // pi_{e,f,0} = id - sum_{i>=1} pi_{e,f,i}.
  rows[0][0] = 1;
  for (int i = 1; i <= m; ++i) {
    for (std::size_t j = 0; j < width; ++j) rows[0][j] -= rows[static_cast<std::size_t>(i)][j];
  }
  return projector_cache.emplace(std::make_pair(e, f), std::move(rows)).first->second;
}

std::uint64_t largest_prime_factor_bound(mpz_class n, std::uint64_t small_limit) {
  std::uint64_t bound = 1;
  for (std::uint64_t q = 2; q <= small_limit && n > 1; ++q) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
      bound = q;
      while (mpz_divisible_ui_p(n.get_mpz_t(), q)) n /= static_cast<unsigned long>(q);
    }
  }
  if (n > 1) {
    // Unfactored remainder; report it as the bound (conservative).
    bound = n.fits_ulong_p() ? std::max<std::uint64_t>(bound, n.get_ui()) : UINT64_MAX;
  }
  return bound;
}

}  // namespace

ProjectorCoeffs projector_coeffs(int e, int f, int i) {
  if (e < 0 || f < 0 || i < 0 || i > std::min(e, f)) {
    throw InvalidInput("projector index out of range: (e,f,i) = (" + std::to_string(e) + "," +
                       std::to_string(f) + "," + std::to_string(i) + ")");
  }
  std::lock_guard lock(cache_mutex);
  return {e, f, i, projector_rows(e, f)[static_cast<std::size_t>(i)]};
}

Rational inverse_lambda(int a, int b, int i) {
  if (a < 0 || b < 0 || i < 0) throw InvalidInput("inverse_lambda needs non-negative arguments");
  std::lock_guard lock(cache_mutex);
  return inverse_lambda_locked(a, b, i);
}

BiForm apply_projector(const ProjectorCoeffs& pc, const BiForm& t) {
  if (t.s_degree() != pc.e || t.d_degree() != pc.f) {
    throw InvalidInput("projector applied to a form of the wrong bidegree");
  }
  BiForm out(pc.e, pc.f);
  BiForm lowered = t;  // Delta^j t
  for (std::size_t j = 0; j < pc.mu.size(); ++j) {
    if (j > 0) lowered = contract(lowered);
    if (lowered.is_zero()) break;
    if (pc.mu[j] == 0) continue;
    BiForm raised = lowered;
    for (std::size_t r = 0; r < j; ++r) raised = multiply_identity(raised);
    out += pc.mu[j] * raised;
  }
  return out;
}

mpz_class falling_factorial(int a, int j) {
  mpz_class r = 1;
  for (int t = 0; t < j; ++t) r *= a - t;
  return r;
}

ChiPoly chi_poly(int e, int f, std::span<const int> components) {
  if (e < 0 || f < 0) throw InvalidInput("chi_poly needs non-negative degrees");
  if (e > f) throw InvalidInput("chi_poly needs e <= f");
  std::vector<int> comps(components.begin(), components.end());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k] < 0 || comps[k] > e) throw InvalidInput("component index out of range");
    if (k > 0 && comps[k - 1] >= comps[k]) throw InvalidInput("components must be strictly increasing");
  }

  ChiPoly chi;
  chi.e = e;
  chi.f = f;
  chi.components = comps;
  chi.coeffs.assign(static_cast<std::size_t>(e) + 1, Rational(0));
  {
    std::lock_guard lock(cache_mutex);
    const auto& rows = projector_rows(e, f);
    for (int i : comps) {
      for (int j = 0; j <= e; ++j) chi.coeffs[static_cast<std::size_t>(j)] += rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  for (int j = 0; j <= e; ++j) {
    auto& c = chi.coeffs[static_cast<std::size_t>(j)];
    c *= Rational(falling_factorial(e, j) * falling_factorial(f, j));
    c.canonicalize();
    chi.denominator_prime_bound = std::max(
        chi.denominator_prime_bound,
        largest_prime_factor_bound(c.get_den(), static_cast<std::uint64_t>(e + f + 3)));
  }
  return chi;
}

Rational eval_delta_power(int a, int b, int i, const QVec3& u, const QVec3& v, const QVec3& p,
                          const QVec3& q) {
  if (i < 0 || a < 0 || b < 0 || i > std::min(a, b)) throw InvalidInput("eval_delta_power index out of range");
  Rational r(falling_factorial(a, i) * falling_factorial(b, i));
  r *= ipow(dot(p, q), i) * ipow(dot(v, u), i) * ipow(dot(u, p), a - i) * ipow(dot(v, q), b - i);
  return r;
}

nlohmann::json to_json(const ChiPoly& chi) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : chi.coeffs) coeffs.push_back({c.get_num().get_str(), c.get_den().get_str()});
  return {{"e", chi.e},
          {"f", chi.f},
          {"components", chi.components},
          {"coeffs", coeffs},
          {"denominatorPrimeBound", chi.denominator_prime_bound}};
}

ChiPoly chi_from_json(const nlohmann::json& j) {
  ChiPoly chi;
  chi.e = j.at("e").get<int>();
  chi.f = j.at("f").get<int>();
  chi.components = j.at("components").get<std::vector<int>>();
  for (const auto& pair : j.at("coeffs")) {
    Rational c(mpz_class(pair.at(0).get<std::string>()), mpz_class(pair.at(1).get<std::string>()));
    c.canonicalize();
    chi.coeffs.push_back(c);
  }
  chi.denominator_prime_bound = j.value("denominatorPrimeBound", std::uint64_t{1});
  if (static_cast<int>(chi.coeffs.size()) != chi.e + 1) throw InvalidInput("chi coefficient count mismatch");
  return chi;
}

}  // namespace ratcert
