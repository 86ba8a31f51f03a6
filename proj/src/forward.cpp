#include "insdel/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "insdel/align.hpp"

namespace insdel {

namespace {

// uniform m-subset of {0..n-1} via partial Fisher-Yates, returned sorted
std::vector<std::int64_t> uniform_subset(std::int64_t n, std::int64_t m,
                                         Rng& rng) {
  std::vector<std::int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<std::int64_t> sample_uniform_composition(std::int64_t m, int bins,
                                                     Rng& rng) {
  if (bins < 1) throw std::invalid_argument("composition needs >= 1 bin");
  if (m < 0) throw std::invalid_argument("negative composition total");
  // positions of the bins-1 separators among m + bins - 1 slots
  std::vector<std::int64_t> gaps(bins, 0);
  if (bins == 1) {
    gaps[0] = m;
    return gaps;
  }
  const auto bars = uniform_subset(m + bins - 1, bins - 1, rng);
  std::int64_t prev = -1;
  for (int b = 0; b < bins - 1; ++b) {
    gaps[b] = bars[b] - prev - 1;
    prev = bars[b];
  }
  gaps[bins - 1] = (m + bins - 1) - prev - 1;
  return gaps;
}

Sequence sample_xt_given_m(const Sequence& x0, std::int64_t m,
                           const InsertionDistribution& pi, Rng& rng) {
  if (m < 0) throw std::invalid_argument("negative insertion count");
  const std::int64_t n = x0.size() + m;
  // which of the n final slots carry insertions: uniform m-subset
  const auto ins = uniform_subset(n, m, rng);
  Sequence out;
  out.id = x0.id;
  out.letters.reserve(n);
  std::size_t next_ins = 0;
  int orig = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (next_ins < ins.size() && ins[next_ins] == i) {
      out.letters.push_back(static_cast<std::uint8_t>(pi.sample(rng)));
      ++next_ins;
    } else {
      out.letters.push_back(x0[orig++]);
    }
  }
  return out;
}

NoisedSample sample_xt(const Sequence& x0, double t, const RateSchedule& sched,
                       const InsertionDistribution& pi, Rng& rng) {
  NoisedSample s;
  s.t = t;
  s.m_t = sample_insertion_count(x0.size(), sched, t, rng);
  s.x_t = sample_xt_given_m(x0, s.m_t, pi, rng);
  return s;
}

BirthPath simulate_pure_birth(const Sequence& x0, double t,
                              const RateSchedule& sched,
                              const InsertionDistribution& pi, Rng& rng) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("simulate_pure_birth: t outside [0, 1]");
  const double tau_max = -std::log(sched.alpha(t));

  // letters tagged with whether they come from x0
  struct Tagged {
    std::uint8_t letter;
    bool original;
  };
  std::vector<Tagged> cur;
  cur.reserve(x0.size() * 2 + 8);
  for (int i = 0; i < x0.size(); ++i) cur.push_back({x0[i], true});

  BirthPath path;
  double tau = 0.0;
  for (;;) {
    const auto n = static_cast<std::int64_t>(cur.size());
    tau += rng.exponential() / static_cast<double>(n + 1);
    if (tau >= tau_max) break;
    const std::int64_t slot = rng.below(n + 1);
    const auto letter = static_cast<std::uint8_t>(pi.sample(rng));
    cur.insert(cur.begin() + slot, {letter, false});
    // invert tau = -log alpha(s):  s = (1 - exp(-tau * t_max / gamma)) / t_max
    path.event_times.push_back(
        (1.0 - std::exp(-tau * sched.t_max / sched.gamma)) / sched.t_max);
  }

  path.gap_sizes.assign(x0.size() + 1, 0);
  int gap = 0;
  path.x_t.id = x0.id;
  path.x_t.letters.reserve(cur.size());
  for (const auto& item : cur) {
    path.x_t.letters.push_back(item.letter);
    if (item.original)
      ++gap;
    else
      ++path.gap_sizes[gap];
  }
  return path;
}

double gap_size_pmf(const RateSchedule& sched, double t, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("gap size must be >= 0");
  const double a = sched.alpha(t);
  return a * std::pow(1.0 - a, static_cast<double>(n));
}

double forward_likelihood(const Sequence& x0, const Sequence& xt,
                          std::int64_t m, const InsertionDistribution& pi) {
  if (m != xt.size() - x0.size())
    throw std::invalid_argument(
        "forward_likelihood: m inconsistent with lengths");
  if (m < 0) throw std::invalid_argument("forward_likelihood: m < 0");

  const double log_ali = count_alignments(x0, xt);
  if (log_ali == kNegInf) return 0.0;

  // letters of xt not accounted for by x0, as a multiset difference
  std::vector<std::int64_t> diff(pi.size(), 0);
  for (auto l : xt.letters) ++diff[l];
  for (auto l : x0.letters) --diff[l];
  double log_pi_prod = 0.0;
  for (int k = 0; k < pi.size(); ++k) {
    if (diff[k] < 0) return 0.0;  // x0 letters missing; ali would be 0 anyway
    log_pi_prod += static_cast<double>(diff[k]) * pi.log_prob(k);
  }

  const double log_binom = std::lgamma(static_cast<double>(xt.size()) + 1.0) -
                           std::lgamma(static_cast<double>(x0.size()) + 1.0) -
                           std::lgamma(static_cast<double>(m) + 1.0);
  return std::exp(log_ali - log_binom + log_pi_prod);
}

}  // namespace insdel
