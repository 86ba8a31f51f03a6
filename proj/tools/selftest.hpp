#pragma once

#include <cstdint>

namespace insdel {

// Runs the built-in oracle suite (exhaustive alignment counts, event-level
// forward simulation, conditioned-path posterior, finite-difference
// gradients, enumerated prior KL) and prints one [PASS]/[FAIL] line per
// check. Returns 0 if everything passed, 2 otherwise.
int run_selftest(std::uint64_t seed);

}  // namespace insdel
