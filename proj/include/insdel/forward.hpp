#pragma once

#include <cstdint>
#include <vector>

#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"

namespace insdel {

// One draw from the insertion noising process.
struct NoisedSample {
  double t = 0.0;
  std::int64_t m_t = 0;
  Sequence x_t;
};

// Closed-form sampler: m ~ NegBin(L+1, alpha(t)), then the inserted letters
// are placed by choosing which m of the final L+m slots are insertions,
// uniformly over all C(L+m, m) choices. Conditioned on the total, the L+1 gap
// sizes of the unit-rate pure-birth process are uniform over weak
// compositions, which is exactly this law (NOT an equal-probability
// multinomial).
NoisedSample sample_xt(const Sequence& x0, double t, const RateSchedule& sched,
                       const InsertionDistribution& pi, Rng& rng);

Sequence sample_xt_given_m(const Sequence& x0, std::int64_t m,
                           const InsertionDistribution& pi, Rng& rng);

// Gap sizes for the slot structure above: a uniform weak composition of m
// into `bins` nonnegative parts.
std::vector<std::int64_t> sample_uniform_composition(std::int64_t m, int bins,
                                                     Rng& rng);

// Event-level oracle. Simulates the pure-birth process exactly by
// time-rescaling: in tau = -log alpha(s) time the process has unit rate per
// slot, so with n letters present the next event is Exp(1)/(n+1) away and
// lands in a uniformly chosen slot. No thinning, no discretization.
struct BirthPath {
  Sequence x_t;
  std::vector<double> event_times;         // in original t coordinates
  std::vector<std::int64_t> gap_sizes;     // |x0|+1 entries, sums to m
};

BirthPath simulate_pure_birth(const Sequence& x0, double t,
                              const RateSchedule& sched,
                              const InsertionDistribution& pi, Rng& rng);

// P(gap holds n letters at time t) = alpha(t) * (1 - alpha(t))^n
double gap_size_pmf(const RateSchedule& sched, double t, std::int64_t n);

// p(xt | x0, m) = C(L+m, L)^-1 * ali(x0, xt) * prod_{b in xt minus x0} pi(b),
// the multiset difference taken letter-wise. Zero when x0 does not embed.
double forward_likelihood(const Sequence& x0, const Sequence& xt,
                          std::int64_t m, const InsertionDistribution& pi);

}  // namespace insdel
