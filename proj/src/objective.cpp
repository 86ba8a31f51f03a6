#include "insdel/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "insdel/align.hpp"
#include "insdel/denoiser.hpp"

namespace insdel {

double DeletionDistribution::log_sum() const {
  double acc = kNegInf;
  for (double lp : log_probs) acc = log_add(acc, lp);
  return acc;
}

int DeletionDistribution::sample(Rng& rng) const {
  double mx = kNegInf;
  for (double lp : log_probs) mx = std::max(mx, lp);
  std::vector<double> w(log_probs.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = log_probs[i] == kNegInf ? 0.0 : std::exp(log_probs[i] - mx);
  return sample_from_weights(w, rng);
}

int DeletionDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (log_probs[i] > log_probs[best]) best = i;
  return best;
}

DeletionDistribution DeletionDistribution::uniform(int n) {
  if (n < 1) throw std::invalid_argument("empty deletion distribution");
  return {std::vector<double>(n, -std::log(static_cast<double>(n)))};
}

DeletionDistribution target_distribution(const Sequence& x0,
                                         const Sequence& xt) {
  const std::int64_t m = xt.size() - x0.size();
  if (m < 1)
    throw std::invalid_argument("target_distribution: needs |xt| > |x0|");
  const double log_total = count_alignments(x0, xt);
  if (log_total == kNegInf)
    throw std::invalid_argument(
        "target_distribution: xt does not contain x0 as a subsequence");
  DeletionDistribution d{alignments_all_deletions(x0, xt)};
  const double log_denom = std::log(static_cast<double>(m)) + log_total;
  for (double& lp : d.log_probs)
    if (lp != kNegInf) lp -= log_denom;
  return d;
}

double kl_divergence(const DeletionDistribution& p,
                     const DeletionDistribution& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: size mismatch");
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p.log_probs[i] == kNegInf) continue;
    acc += std::exp(p.log_probs[i]) * (p.log_probs[i] - q.log_probs[i]);
  }
  return acc;
}

double denoising_kl(const Sequence& x0, const NoisedSample& sample,
                    const DenoiserModel& model) {
  const auto p = target_distribution(x0, sample.x_t);
  const auto q = model.predict(sample.x_t, sample.m_t);
  return kl_divergence(p, q);
}

DeletionDistribution windowed_distribution(const DeletionDistribution& window,
                                           int window_start, int full_len) {
  const int w = window.size();
  if (window_start < 0 || window_start + w > full_len)
    throw std::invalid_argument("windowed_distribution: window out of range");
  const double log_full = std::log(static_cast<double>(full_len));
  DeletionDistribution out{std::vector<double>(full_len, -log_full)};
  const double log_scale =
      std::log(static_cast<double>(w)) - log_full;  // w / full_len
  for (int i = 0; i < w; ++i) {
    const double lp = window.log_probs[i];
    out.log_probs[window_start + i] = lp == kNegInf ? kNegInf : lp + log_scale;
  }
  return out;
}

double prior_kl_estimate(const Sequence& x0, std::int64_t m1,
                         const InsertionDistribution& pi, int n_samples,
                         Rng& rng) {
  if (m1 < 0) throw std::invalid_argument("prior_kl_estimate: m1 < 0");
  if (n_samples < 1)
    throw std::invalid_argument("prior_kl_estimate: need >= 1 sample");
  const auto len0 = static_cast<double>(x0.size());
  const double log_binom = std::lgamma(static_cast<double>(m1) + len0 + 1.0) -
                           std::lgamma(len0 + 1.0) -
                           std::lgamma(static_cast<double>(m1) + 1.0);
  double log_pi_x0 = 0.0;
  for (auto l : x0.letters) log_pi_x0 += pi.log_prob(l);

  double acc = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Sequence x1 = sample_xt_given_m(x0, m1, pi, rng);
    acc += count_alignments(x0, x1) - log_binom - log_pi_x0;
  }
  return acc / n_samples;
}

ElboReport elbo(const Sequence& x0, const DenoiserModel& model,
                const RateSchedule& sched, const InsertionDistribution& pi,
                int n_samples, int window, Rng& rng) {
  if (x0.empty()) throw std::invalid_argument("elbo: empty sequence");
  if (n_samples < 1) throw std::invalid_argument("elbo: need >= 1 sample");

  ElboReport rep;
  rep.n_samples = n_samples;

  const double alpha1 = sched.alpha_end();
  double prior = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const std::int64_t m1 = sample_negative_binomial(x0.size() + 1, alpha1, rng);
    prior += prior_kl_estimate(x0, m1, pi, 1, rng);
  }
  rep.prior_kl = prior / n_samples;

  double denoise = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const double t = rng.u01();
    const NoisedSample sample = sample_xt(x0, t, sched, pi, rng);
    if (sample.m_t == 0) continue;  // zero target entropy, zero weight
    const auto p = target_distribution(x0, sample.x_t);
    const auto q = predict_full(model, sample.x_t, sample.m_t, window, rng);
    denoise += sched.loss_weight(sample.m_t, t) * kl_divergence(p, q);
  }
  rep.denoising_term = denoise / n_samples;

  rep.nll_per_token = (rep.prior_kl + rep.denoising_term) / x0.size();
  rep.perplexity = std::exp(rep.nll_per_token);
  return rep;
}

}  // namespace insdel
