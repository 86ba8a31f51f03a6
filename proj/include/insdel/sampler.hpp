#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "insdel/denoiser.hpp"
#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"

namespace insdel {

// Unconditional generation of a length-L sequence. Start from L + M i.i.d.
// pi letters with M ~ NegBin(L+1, alpha(1)); while letters remain to remove,
// run corrector_steps rounds of (delete per model, insert a pi letter at a
// uniform slot) at the current budget, then one net deletion. Exactly
// M * (corrector_steps + 1) model calls.
Sequence generate(int length, const DenoiserModel& model,
                  const RateSchedule& sched, const InsertionDistribution& pi,
                  int corrector_steps, int window, Rng& rng);

struct ShrinkStep {
  int position = 0;  // index in the sequence at the moment of deletion
  int letter = 0;
  double log_prob = 0.0;  // model log-probability of this deletion
};

// Audit record: replaying steps[i].position deletions in order on `initial`
// yields `final`.
struct ShrinkTrace {
  Sequence initial;
  std::vector<ShrinkStep> steps;
  Sequence final;
};

enum class ShrinkMode { sample, greedy };

// Deletion-only reduction of x by m letters; the model is conditioned on the
// remaining budget m, m-1, ..., 1. Greedy mode takes the argmax (lowest index
// on ties) and never consumes randomness, so it is deterministic end to end.
// The output is a subsequence of x by construction.
std::pair<Sequence, ShrinkTrace> shrink(const Sequence& x, std::int64_t m,
                                        const DenoiserModel& model,
                                        ShrinkMode mode, int window, Rng& rng);

// k distinct deletion positions from a single model call at the given
// remaining budget: sequential draws without replacement from the predicted
// distribution. Indices refer to x. k = 1 reduces to one shrink step.
std::vector<int> k_gillespie_deletions(const Sequence& x,
                                       std::int64_t m_remaining,
                                       const DenoiserModel& model, int k,
                                       int window, Rng& rng);

// shrink variant taking k positions per model call (trace records them in
// the order they are applied)
std::pair<Sequence, ShrinkTrace> shrink_k(const Sequence& x, std::int64_t m,
                                          const DenoiserModel& model, int k,
                                          int window, Rng& rng);

}  // namespace insdel
