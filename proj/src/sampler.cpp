#include "insdel/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "insdel/align.hpp"

namespace insdel {

Sequence generate(int length, const DenoiserModel& model,
                  const RateSchedule& sched, const InsertionDistribution& pi,
                  int corrector_steps, int window, Rng& rng) {
  if (length < 1) throw std::invalid_argument("generate: length must be >= 1");
  if (corrector_steps < 0)
    throw std::invalid_argument("generate: corrector_steps must be >= 0");

  std::int64_t m = sample_negative_binomial(length + 1, sched.alpha_end(), rng);
  Sequence x;
  x.letters.reserve(length + m);
  for (std::int64_t i = 0; i < length + m; ++i)
    x.letters.push_back(static_cast<std::uint8_t>(pi.sample(rng)));

  while (m > 0) {
    for (int c = 0; c < corrector_steps; ++c) {
      const auto dist = predict_full(model, x, m, window, rng);
      const int pos = dist.sample(rng);
      x.letters.erase(x.letters.begin() + pos);
      const std::int64_t slot = rng.below(x.size() + 1);
      x.letters.insert(x.letters.begin() + slot,
                       static_cast<std::uint8_t>(pi.sample(rng)));
    }
    const auto dist = predict_full(model, x, m, window, rng);
    const int pos = dist.sample(rng);
    x.letters.erase(x.letters.begin() + pos);
    --m;
  }
  return x;
}

std::pair<Sequence, ShrinkTrace> shrink(const Sequence& x, std::int64_t m,
                                        const DenoiserModel& model,
                                        ShrinkMode mode, int window, Rng& rng) {
  if (m < 1 || m >= x.size())
    throw std::invalid_argument("shrink: need 1 <= m < |x|");

  ShrinkTrace trace;
  trace.initial = x;
  Sequence cur = x;
  for (std::int64_t budget = m; budget >= 1; --budget) {
    DeletionDistribution dist;
    int pos;
    if (mode == ShrinkMode::greedy) {
      // deterministic: full-length prediction, no window draw, argmax
      dist = model.predict(cur, budget);
      pos = dist.argmax();
    } else {
      dist = predict_full(model, cur, budget, window, rng);
      pos = dist.sample(rng);
    }
    trace.steps.push_back({pos, cur[pos], dist.log_probs[pos]});
    cur.letters.erase(cur.letters.begin() + pos);
  }
  trace.final = cur;
  return {std::move(cur), std::move(trace)};
}

std::vector<int> k_gillespie_deletions(const Sequence& x,
                                       std::int64_t m_remaining,
                                       const DenoiserModel& model, int k,
                                       int window, Rng& rng) {
  if (k < 1 || k > m_remaining || k >= x.size())
    throw std::invalid_argument(
        "k_gillespie_deletions: need 1 <= k <= min(m, |x| - 1)");
  auto dist = predict_full(model, x, m_remaining, window, rng);
  std::vector<double> w(dist.size());
  for (int i = 0; i < dist.size(); ++i)
    w[i] = dist.log_probs[i] == kNegInf ? 0.0 : std::exp(dist.log_probs[i]);
  std::vector<int> picks;
  picks.reserve(k);
  for (int j = 0; j < k; ++j) {
    const int pos = sample_from_weights(w, rng);
    picks.push_back(pos);
    w[pos] = 0.0;  // without replacement
  }
  return picks;
}

std::pair<Sequence, ShrinkTrace> shrink_k(const Sequence& x, std::int64_t m,
                                          const DenoiserModel& model, int k,
                                          int window, Rng& rng) {
  if (m < 1 || m >= x.size())
    throw std::invalid_argument("shrink: need 1 <= m < |x|");
  if (k < 1) throw std::invalid_argument("shrink: k must be >= 1");

  ShrinkTrace trace;
  trace.initial = x;
  Sequence cur = x;
  std::int64_t budget = m;
  while (budget > 0) {
    const int take = static_cast<int>(
        std::min<std::int64_t>(k, std::min<std::int64_t>(budget, cur.size() - 1)));
    auto dist = predict_full(model, cur, budget, window, rng);
    std::vector<double> w(dist.size());
    for (int i = 0; i < dist.size(); ++i)
      w[i] = dist.log_probs[i] == kNegInf ? 0.0 : std::exp(dist.log_probs[i]);

    // draw without replacement, then apply highest index first so each
    // recorded position is valid at its own replay step
    std::vector<std::pair<int, double>> picks;
    picks.reserve(take);
    double remaining = 0.0;
    for (double v : w) remaining += v;
    for (int j = 0; j < take; ++j) {
      const int pos = sample_from_weights(w, rng);
      const double p = w[pos] / remaining;
      picks.emplace_back(pos, std::log(p));
      remaining -= w[pos];
      w[pos] = 0.0;
    }
    std::sort(picks.begin(), picks.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [pos, lp] : picks) {
      trace.steps.push_back({pos, cur[pos], lp});
      cur.letters.erase(cur.letters.begin() + pos);
    }
    budget -= take;
  }
  trace.final = cur;
  return {std::move(cur), std::move(trace)};
}

}  // namespace insdel
