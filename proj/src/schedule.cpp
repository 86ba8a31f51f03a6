#include "insdel/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace insdel {

void RateSchedule::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("schedule: gamma must be > 0");
  if (!(t_max > 0.0 && t_max < 1.0))
    throw std::invalid_argument("schedule: t_max must be in (0, 1)");
}

double RateSchedule::beta(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("schedule: t outside [0, 1]");
  return gamma / (1.0 - t_max * t);
}

double RateSchedule::alpha(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("schedule: t outside [0, 1]");
  return std::pow(1.0 - t_max * t, gamma / t_max);
}

double RateSchedule::loss_weight(std::int64_t m, double t) const {
  if (m < 0) throw std::invalid_argument("loss_weight: m must be >= 0");
  if (m == 0) return 0.0;
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("loss_weight: weight singular at t=0");
  return static_cast<double>(m) * beta(t) / (1.0 - alpha(t));
}

double InsertionDistribution::log_prob(int letter) const {
  return std::log(p.at(letter));
}

int InsertionDistribution::sample(Rng& rng) const {
  return sample_from_weights(p, rng);
}

void InsertionDistribution::validate() const {
  if (p.empty())
    throw std::invalid_argument("insertion distribution is empty");
  double total = 0.0;
  for (double x : p) {
    if (!(x > 0.0))
      throw std::invalid_argument(
          "insertion distribution entries must be strictly positive");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("insertion distribution must sum to 1");
}

InsertionDistribution InsertionDistribution::uniform(int k) {
  if (k < 1) throw std::invalid_argument("alphabet size must be >= 1");
  return {std::vector<double>(k, 1.0 / k)};
}

InsertionDistribution InsertionDistribution::from_corpus(const Corpus& c,
                                                         double eps) {
  if (c.sequences.empty())
    throw std::invalid_argument("pi from corpus: corpus is empty");
  const int k = c.alphabet.size();
  std::vector<double> counts(k, eps);
  double total = eps * k;
  for (const auto& s : c.sequences)
    for (auto l : s.letters) {
      counts[l] += 1.0;
      total += 1.0;
    }
  for (double& x : counts) x /= total;
  return {std::move(counts)};
}

InsertionDistribution InsertionDistribution::explicit_probs(
    std::vector<double> probs) {
  InsertionDistribution d{std::move(probs)};
  d.validate();
  // exact renormalization so downstream log-sums cancel cleanly
  double total = 0.0;
  for (double x : d.p) total += x;
  for (double& x : d.p) x /= total;
  return d;
}

std::int64_t sample_insertion_count(int seq_len, const RateSchedule& sched,
                                    double t, Rng& rng) {
  if (seq_len < 0) throw std::invalid_argument("negative sequence length");
  return sample_negative_binomial(seq_len + 1, sched.alpha(t), rng);
}

}  // namespace insdel
