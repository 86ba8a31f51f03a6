#include "insdel/scorer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "insdel/align.hpp"

namespace insdel {

ScoreTable score_single_deletions(const Sequence& x,
                                  const DenoiserModel& model) {
  if (x.size() < 2)
    throw std::invalid_argument("score_single_deletions: need |x| >= 2");
  const auto dist = model.predict(x, 1);
  ScoreTable table;
  table.id = x.id;
  table.entries.reserve(x.size());
  for (int i = 0; i < x.size(); ++i)
    table.entries.push_back({i, x[i], dist.log_probs[i]});
  return table;
}

namespace {

Sequence erase_positions(const Sequence& x, std::uint32_t mask,
                         const std::vector<int>& positions) {
  Sequence out;
  out.letters.reserve(x.size());
  std::size_t next = 0;
  for (int i = 0; i < x.size(); ++i) {
    bool drop = false;
    while (next < positions.size() && positions[next] < i) ++next;
    if (next < positions.size() && positions[next] == i)
      drop = (mask >> next) & 1u;
    if (!drop) out.letters.push_back(x[i]);
  }
  return out;
}

Sequence erase_sorted(const Sequence& x, const std::vector<int>& deleted) {
  Sequence out;
  out.letters.reserve(x.size());
  std::size_t next = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (next < deleted.size() && deleted[next] == i) {
      ++next;
      continue;
    }
    out.letters.push_back(x[i]);
  }
  return out;
}

}  // namespace

SetScore score_deletion_set(const Sequence& x, std::vector<int> positions,
                            const DenoiserModel& model, int max_exact,
                            int n_mc, Rng& rng) {
  const int m = static_cast<int>(positions.size());
  if (m < 1 || m > x.size() - 1)
    throw std::invalid_argument(
        "score_deletion_set: need 1 <= |positions| <= |x| - 1");
  std::sort(positions.begin(), positions.end());
  for (int i = 0; i < m; ++i) {
    if (positions[i] < 0 || positions[i] >= x.size())
      throw std::invalid_argument("score_deletion_set: position out of range");
    if (i > 0 && positions[i] == positions[i - 1])
      throw std::invalid_argument("score_deletion_set: duplicate position");
  }

  if (m <= max_exact) {
    // sum over all orderings via a subset DP: g[S] = total probability of
    // deleting exactly the subset S so far, one model call per proper subset
    if (m > 20)
      throw std::invalid_argument("score_deletion_set: exact set too large");
    const std::uint32_t full = (1u << m) - 1u;
    std::vector<double> g(full + 1u, kNegInf);
    g[0] = 0.0;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if (g[mask] == kNegInf) continue;
      const int done = std::popcount(mask);
      const Sequence cur = erase_positions(x, mask, positions);
      const auto dist = model.predict(cur, m - done);
      for (int i = 0; i < m; ++i) {
        if ((mask >> i) & 1u) continue;
        const int shift =
            std::popcount(mask & ((1u << i) - 1u));  // deletions before i
        const double lp = dist.log_probs[positions[i] - shift];
        if (lp == kNegInf) continue;
        const std::uint32_t to = mask | (1u << i);
        g[to] = log_add(g[to], g[mask] + lp);
      }
    }
    return {g[full], true};
  }

  if (n_mc < 1)
    throw std::invalid_argument("score_deletion_set: need n_mc >= 1");
  // unbiased in probability space: m!/n_mc * sum over sampled orderings
  std::vector<int> order(m), deleted;
  double acc = kNegInf;
  for (int s = 0; s < n_mc; ++s) {
    for (int i = 0; i < m; ++i) order[i] = i;
    for (int i = 0; i < m - 1; ++i) {
      const auto j = i + rng.below(m - i);
      std::swap(order[i], order[j]);
    }
    double path = 0.0;
    deleted.clear();
    for (int step = 0; step < m && path != kNegInf; ++step) {
      const int pos = positions[order[step]];
      const Sequence cur = erase_sorted(x, deleted);
      const auto dist = model.predict(cur, m - step);
      const auto it = std::lower_bound(deleted.begin(), deleted.end(), pos);
      const auto shift = static_cast<int>(it - deleted.begin());
      const double lp = dist.log_probs[pos - shift];
      path = lp == kNegInf ? kNegInf : path + lp;
      deleted.insert(it, pos);
    }
    acc = log_add(acc, path);
  }
  double log_fact = 0.0;
  for (int i = 2; i <= m; ++i) log_fact += std::log(static_cast<double>(i));
  return {log_fact - std::log(static_cast<double>(n_mc)) + acc, false};
}

}  // namespace insdel
