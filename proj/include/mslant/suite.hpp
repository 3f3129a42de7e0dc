#pragma once

#include "mslant/report.hpp"
#include "mslant/scenario.hpp"

namespace mslant {

// Number of random tangent vectors used by the pointwise angle relation.
inline constexpr int kAngleRelationVectors = 200;

// Runs the requested checks in kCheckOrder. The structure is validated
// first; when it fails the report holds only that failure and nothing is
// sampled. Deterministic for a fixed scenario and seed.
VerificationReport run_suite(const ResolvedScenario& s);

// 0 when every check passes, 1 otherwise.
int exit_code(const VerificationReport& report);
inline constexpr int kExitConfigError = 2;

}  // namespace mslant
