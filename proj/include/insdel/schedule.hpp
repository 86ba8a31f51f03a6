#pragma once

#include <cstdint>
#include <vector>

#include "insdel/rng.hpp"
#include "insdel/seq.hpp"

namespace insdel {

// Insertion-rate schedule for the pure-birth noising process. Every existing
// gap gains letters at rate beta(t); alpha(t) = exp(-int_0^t beta) is the
// survival weight that drives all closed forms.
//
//   beta(t)  = gamma / (1 - t_max * t)
//   alpha(t) = (1 - t_max * t)^(gamma / t_max)
//
// gamma > 0 and 0 < t_max < 1, so beta stays finite on [0,1] and
// alpha(1) = (1 - t_max)^(gamma / t_max) > 0.
struct RateSchedule {
  double gamma = 1.1;
  double t_max = 0.9;

  void validate() const;

  double beta(double t) const;
  double alpha(double t) const;
  double alpha_end() const { return alpha(1.0); }

  // Per-draw weight m * beta(t) / (1 - alpha(t)) on the denoising
  // cross-entropy. m = 0 short-circuits to 0; the weight is singular at t = 0
  // for m > 0 (1 - alpha(0) = 0) and that call is an error.
  double loss_weight(std::int64_t m, double t) const;
};

// Categorical distribution over the alphabet used for inserted letters.
// Strictly positive entries summing to 1.
struct InsertionDistribution {
  std::vector<double> p;

  int size() const { return static_cast<int>(p.size()); }
  double log_prob(int letter) const;
  int sample(Rng& rng) const;
  void validate() const;

  static InsertionDistribution uniform(int k);
  // empirical letter frequencies with additive smoothing eps, renormalized
  static InsertionDistribution from_corpus(const Corpus& c, double eps = 1e-6);
  static InsertionDistribution explicit_probs(std::vector<double> probs);
};

// Number of letters inserted by time t around a clean sequence of length
// seq_len: negative binomial with seq_len + 1 successes at probability
// alpha(t) (one geometric gap per insertion slot).
std::int64_t sample_insertion_count(int seq_len, const RateSchedule& sched,
                                    double t, Rng& rng);

}  // namespace insdel
