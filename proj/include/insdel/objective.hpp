#pragma once

#include <cstdint>
#include <vector>

#include "insdel/forward.hpp"
#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"

namespace insdel {

class DenoiserModel;

// Distribution over "delete position l" for a concrete sequence, stored as
// log probabilities. log_sum() stays within 1e-9 of 0.
struct DeletionDistribution {
  std::vector<double> log_probs;

  int size() const { return static_cast<int>(log_probs.size()); }
  double log_sum() const;
  int sample(Rng& rng) const;
  int argmax() const;  // ties broken toward the lowest index

  static DeletionDistribution uniform(int n);
};

// Exact posterior over which position of xt was inserted last, given that the
// process started from x0:
//   p(l) = ali(x0, xt minus l) / (m * ali(x0, xt)),  m = |xt| - |x0| >= 1.
// The normalization is an identity: summing the deleted-position counts over
// l gives exactly m * ali(x0, xt). Positions whose deletion breaks the
// embedding get probability 0 (-inf log). Errors when m < 1 or xt does not
// contain x0 as a subsequence.
DeletionDistribution target_distribution(const Sequence& x0,
                                         const Sequence& xt);

// KL(p || q) over deletion positions; p-zero entries contribute 0.
double kl_divergence(const DeletionDistribution& p,
                     const DeletionDistribution& q);

// KL between the exact target for (x0, sample) and the model's prediction.
double denoising_kl(const Sequence& x0, const NoisedSample& sample,
                    const DenoiserModel& model);

// Lift a distribution over a window [start, start+w) to the full sequence:
// in-window mass is scaled by w / full_len and the remaining mass is spread
// uniformly over the out-of-window positions (each of which gets exactly
// 1 / full_len). Identity when the window covers everything.
DeletionDistribution windowed_distribution(const DeletionDistribution& window,
                                           int window_start, int full_len);

// Monte-Carlo estimate of KL(p(X1 | x0, m1) || iid-pi of length L + m1):
// draws X1 from the forward closed form and averages
//   log ali(x0, X1) - log C(m1 + L, L) - sum_i log pi(x0_i),
// which is the exact log density ratio. Nonnegative in expectation and
// shrinking in m1.
double prior_kl_estimate(const Sequence& x0, std::int64_t m1,
                         const InsertionDistribution& pi, int n_samples,
                         Rng& rng);

struct ElboReport {
  double prior_kl = 0.0;        // mismatch against the length-conditioned prior
  double denoising_term = 0.0;  // weighted denoising cross-entropy gap
  double nll_per_token = 0.0;
  double perplexity = 1.0;
  int n_samples = 0;
};

// Stochastic upper bound on -log q(x0 | L):
//   prior KL at m1 ~ NegBin(L+1, alpha(1))
//   + mean over n_samples draws of t ~ U(0,1), x_t ~ forward of
//     loss_weight(m_t, t) * KL(target || model prediction),
// draws with m_t = 0 contributing exactly 0. Predictions for |x_t| > window
// route through a sampled window; window = 0 disables windowing.
ElboReport elbo(const Sequence& x0, const DenoiserModel& model,
                const RateSchedule& sched, const InsertionDistribution& pi,
                int n_samples, int window, Rng& rng);

}  // namespace insdel
