#pragma once

#include <string>

namespace ratcert {

/// Outcome of a randomized certificate. A failed run never disproves
/// anything, so there is no negative status.
enum class Status { Pass, Inconclusive };

inline std::string to_string(Status s) { return s == Status::Pass ? "PASS" : "INCONCLUSIVE"; }

}  // namespace ratcert
