#pragma once

// Combinatorics of irreducible SL3 modules V(a, b) and the search for
// double-bundle candidates U = V(e,0), V = V(0,d), W = sum_{i in I} V(e-i, d-i).

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ratcert::rep {

/// Highest weight a*w1 + b*w2.
struct Weight {
  int a = 0;
  int b = 0;
  auto operator<=>(const Weight&) const = default;
};

/// Weyl dimension formula (a+1)(b+1)(a+b+2)/2.
std::uint64_t dim_irrep(Weight w);

struct RepComponent {
  Weight weight;
  int multiplicity = 1;
  bool operator==(const RepComponent&) const = default;
};

/// Direct sum of irreducibles, ordered by decreasing highest weight.
struct RepSum {
  std::vector<RepComponent> components;

  std::uint64_t dimension() const;
  bool operator==(const RepSum&) const = default;
};

/// S^e (x) D^f = V(e,f) + V(e-1,f-1) + ... + V(e-m,f-m), m = min(e,f).
RepSum decompose_tensor(int e, int f);

/// Numeric hypotheses of the double bundle construction:
/// dim U - dim W = 1 and dim V - dim U > kappa.
struct DimensionCheck {
  std::uint64_t dim_u = 0;
  std::uint64_t dim_v = 0;
  std::uint64_t dim_w = 0;
  std::uint64_t kappa = 0;

  bool corank_one() const { return dim_u == dim_w + 1; }
  bool room_for_base() const { return dim_v > dim_u && dim_v - dim_u > kappa; }
  bool holds() const { return corank_one() && room_for_base(); }
};

DimensionCheck check_dimensions(const RepSum& u, const RepSum& v, const RepSum& w,
                                std::uint64_t kappa);

struct Candidate {
  int d = 0;
  int e = 0;
  std::vector<int> components;  // strictly increasing, subset of [0, min(e, d)]
  std::uint64_t dim_u = 0;
  std::uint64_t dim_v = 0;
  std::uint64_t dim_w = 0;
  std::uint64_t kappa = 0;

  RepSum u() const;
  RepSum v() const;
  RepSum w() const;

  bool operator==(const Candidate&) const = default;
};

/// Fills in the dimensions of a candidate from (d, e, components, kappa).
Candidate make_candidate(int d, int e, std::vector<int> components, std::uint64_t kappa);

/// Every violated invariant, as a human-readable message. Empty means valid.
std::vector<std::string> validate(const Candidate& c);

inline constexpr std::uint64_t kDefaultKappa = 19;

struct ERange {
  int lo = 1;
  int hi = 0;
};

/// Largest e with dim V(e,0) < dim V(0,d) - kappa (0 if there is none).
int default_e_max(int d, std::uint64_t kappa);

/// All (e, I) meeting the candidate invariants, sorted by e and then
/// lexicographically by I.
std::vector<Candidate> search_candidates(int d, std::uint64_t kappa = kDefaultKappa,
                                         std::optional<ERange> e_range = std::nullopt);

nlohmann::json to_json(const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& j);

}  // namespace ratcert::rep
