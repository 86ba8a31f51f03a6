#pragma once

#include <cstdint>
#include <vector>

#include "insdel/denoiser.hpp"
#include "insdel/rng.hpp"
#include "insdel/seq.hpp"

namespace insdel {

struct ScoreEntry {
  int position = 0;
  int letter = 0;
  double log_prob = 0.0;
};

// log model probability of each single deletion from x, i.e. the full
// predict(x, 1) table
struct ScoreTable {
  std::string id;
  std::vector<ScoreEntry> entries;
};

ScoreTable score_single_deletions(const Sequence& x, const DenoiserModel& model);

struct SetScore {
  double log_prob = 0.0;
  bool exact = true;  // false: unbiased Monte-Carlo estimate over orderings
};

// log probability that the model deletes exactly this set of positions
// (indices into x) over |positions| steps, conditioning each step on the
// remaining budget. The exact value sums path probabilities over all
// orderings; positions shift as earlier deletions land, so each step remaps
// original indices by the number of already-deleted positions before them.
// Beyond max_exact positions the sum is estimated from n_mc uniformly random
// orderings.
SetScore score_deletion_set(const Sequence& x, std::vector<int> positions,
                            const DenoiserModel& model, int max_exact,
                            int n_mc, Rng& rng);

}  // namespace insdel
