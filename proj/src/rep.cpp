#include "ratcert/rep.hpp"

#include <algorithm>
#include <functional>

#include "ratcert/errors.hpp"

namespace ratcert::rep {

std::uint64_t dim_irrep(Weight w) {
  if (w.a < 0 || w.b < 0) throw InvalidInput("negative highest weight");
  const std::uint64_t a = static_cast<std::uint64_t>(w.a);
  const std::uint64_t b = static_cast<std::uint64_t>(w.b);
  return (a + 1) * (b + 1) * (a + b + 2) / 2;
}

std::uint64_t RepSum::dimension() const {
  std::uint64_t total = 0;
  for (const auto& c : components) total += dim_irrep(c.weight) * static_cast<std::uint64_t>(c.multiplicity);
  return total;
}

RepSum decompose_tensor(int e, int f) {
  if (e < 0 || f < 0) throw InvalidInput("tensor degrees must be non-negative");
  RepSum out;
  for (int i = 0; i <= std::min(e, f); ++i) out.components.push_back({{e - i, f - i}, 1});
  return out;
}

DimensionCheck check_dimensions(const RepSum& u, const RepSum& v, const RepSum& w,
                                std::uint64_t kappa) {
  return {u.dimension(), v.dimension(), w.dimension(), kappa};
}

RepSum Candidate::u() const { return {{{{e, 0}, 1}}}; }
RepSum Candidate::v() const { return {{{{0, d}, 1}}}; }
RepSum Candidate::w() const {
  RepSum out;
  for (int i : components) out.components.push_back({{e - i, d - i}, 1});
  return out;
}

Candidate make_candidate(int d, int e, std::vector<int> components, std::uint64_t kappa) {
  Candidate c;
  c.d = d;
  c.e = e;
  c.components = std::move(components);
  c.kappa = kappa;
  if (d < 1 || e < 0 || e > d) throw InvalidInput("candidate needs d >= 1 and 0 <= e <= d");
  for (int i : c.components) {
    if (i < 0 || i > std::min(e, d)) throw InvalidInput("component index out of range");
  }
  c.dim_u = c.u().dimension();
  c.dim_v = c.v().dimension();
  c.dim_w = c.w().dimension();
  return c;
}

std::vector<std::string> validate(const Candidate& c) {
  std::vector<std::string> problems;
  if (c.d < 1) problems.emplace_back("d must be positive");
  if (c.e < 0 || c.e > c.d) problems.emplace_back("e must lie in [0, d]");
  if (c.kappa < 1) problems.emplace_back("kappa must be positive");
  if (c.components.empty()) problems.emplace_back("component set is empty");
  for (std::size_t k = 0; k < c.components.size(); ++k) {
    const int i = c.components[k];
    if (i < 0 || i > std::min(c.e, c.d)) problems.emplace_back("component index out of range");
    if (k > 0 && c.components[k - 1] >= i) problems.emplace_back("components not strictly increasing");
  }
  if (!problems.empty()) return problems;

  if (c.dim_u != dim_irrep({c.e, 0})) problems.emplace_back("dim_U != dim V(e,0)");
  if (c.dim_v != dim_irrep({0, c.d})) problems.emplace_back("dim_V != dim V(0,d)");
  if (c.dim_w != c.w().dimension()) problems.emplace_back("dim_W != sum of component dimensions");
  const DimensionCheck dims{c.dim_u, c.dim_v, c.dim_w, c.kappa};
  if (!dims.corank_one()) problems.emplace_back("dim_U - dim_W != 1");
  if (!dims.room_for_base()) problems.emplace_back("dim_V - dim_U <= kappa");
  return problems;
}

int default_e_max(int d, std::uint64_t kappa) {
  const std::uint64_t dim_v = dim_irrep({0, d});
  int e = 0;
  while (dim_irrep({e + 1, 0}) + kappa < dim_v) ++e;
  return e;
}

std::vector<Candidate> search_candidates(int d, std::uint64_t kappa, std::optional<ERange> e_range) {
  if (d < 1) throw InvalidInput("search needs d >= 1");
  if (kappa < 1) throw InvalidInput("search needs kappa >= 1");
  const ERange range = e_range.value_or(ERange{1, default_e_max(d, kappa)});
  const std::uint64_t dim_v = dim_irrep({0, d});

  std::vector<Candidate> out;
  for (int e = std::max(range.lo, 0); e <= std::min(range.hi, d); ++e) {
    const std::uint64_t dim_u = dim_irrep({e, 0});
    if (!(dim_v > dim_u && dim_v - dim_u > kappa)) continue;
    const std::uint64_t target = dim_u - 1;

    // Items that fit at all; index i is the component V(e-i, d-i).
    std::vector<std::pair<int, std::uint64_t>> items;
    for (int i = 0; i <= std::min(e, d); ++i) {
      const std::uint64_t w = dim_irrep({e - i, d - i});
      if (w <= target) items.emplace_back(i, w);
    }
    const std::size_t n = items.size();
    const std::size_t width = static_cast<std::size_t>(target) + 1;

    // reach[k][s]: sum s is attainable with items k..n-1.
    std::vector<std::vector<char>> reach(n + 1, std::vector<char>(width, 0));
    reach[n][0] = 1;
    for (std::size_t k = n; k-- > 0;) {
      const auto w = static_cast<std::size_t>(items[k].second);
      for (std::size_t s = 0; s < width; ++s) {
        reach[k][s] = reach[k + 1][s] || (s >= w && reach[k + 1][s - w]);
      }
    }
    if (!reach[0][target]) continue;

    // Depth-first in lexicographic order; a prefix is emitted before its
    // extensions. remaining = target - sum(prefix).
    std::vector<int> prefix;
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t next, std::size_t remaining) {
      if (remaining == 0) {
        out.push_back(make_candidate(d, e, prefix, kappa));
        return;
      }
      for (std::size_t k = next; k < n; ++k) {
        const auto w = static_cast<std::size_t>(items[k].second);
        if (w > remaining || !reach[k + 1][remaining - w]) continue;
        prefix.push_back(items[k].first);
        walk(k + 1, remaining - w);
        prefix.pop_back();
      }
    };
    walk(0, static_cast<std::size_t>(target));
  }
  return out;
}

nlohmann::json to_json(const Candidate& c) {
  return {{"d", c.d},         {"e", c.e},         {"components", c.components},
          {"dimU", c.dim_u}, {"dimV", c.dim_v}, {"dimW", c.dim_w},
          {"kappa", c.kappa}};
}

Candidate candidate_from_json(const nlohmann::json& j) {
  Candidate c = make_candidate(j.at("d").get<int>(), j.at("e").get<int>(),
                               j.at("components").get<std::vector<int>>(),
                               j.at("kappa").get<std::uint64_t>());
  return c;
}

}  // namespace ratcert::rep
