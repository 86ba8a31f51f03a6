#include "selftest.hpp"

#include <bit>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "insdel/align.hpp"
#include "insdel/denoiser.hpp"
#include "insdel/forward.hpp"
#include "insdel/objective.hpp"
#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"

namespace insdel {

namespace {

bool report(const char* name, bool ok, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : ": ", detail.c_str());
  return ok;
}

double chi_square_pvalue(double stat, int df) {
  return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

// chi-square goodness of fit with tail bins merged until expected >= 5
double gof_pvalue(const std::map<std::int64_t, std::int64_t>& observed,
                  double n, const std::vector<double>& pmf) {
  std::vector<double> exp_counts, obs_counts;
  double tail_exp = n, tail_obs = n;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double e = n * pmf[k];
    if (e < 5.0) break;
    const auto it = observed.find(static_cast<std::int64_t>(k));
    const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    exp_counts.push_back(e);
    obs_counts.push_back(o);
    tail_exp -= e;
    tail_obs -= o;
  }
  if (tail_exp > 0.0) {
    exp_counts.push_back(tail_exp);
    obs_counts.push_back(tail_obs);
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < exp_counts.size(); ++i) {
    const double d = obs_counts[i] - exp_counts[i];
    stat += d * d / exp_counts[i];
  }
  return chi_square_pvalue(stat, static_cast<int>(exp_counts.size()) - 1);
}

// number of index subsets of y spelling x, by direct enumeration
std::int64_t brute_count(const Sequence& x, const Sequence& y) {
  const int lx = x.size(), ly = y.size();
  if (lx > ly) return 0;
  std::int64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << ly); ++mask) {
    if (std::popcount(mask) != lx) continue;
    int a = 0;
    bool ok = true;
    for (int j = 0; j < ly && ok; ++j)
      if ((mask >> j) & 1u) ok = x[a++] == y[j];
    if (ok) ++count;
  }
  return count;
}

Sequence bits_to_seq(std::uint32_t bits, int len) {
  Sequence s;
  for (int i = 0; i < len; ++i)
    s.letters.push_back(static_cast<std::uint8_t>((bits >> i) & 1u));
  return s;
}

bool check_alignment_counts(Rng& rng) {
  for (int lx = 0; lx <= 3; ++lx)
    for (std::uint32_t xb = 0; xb < (1u << lx); ++xb) {
      const Sequence x = bits_to_seq(xb, lx);
      for (int ly = 1; ly <= 6; ++ly)
        for (std::uint32_t yb = 0; yb < (1u << ly); ++yb) {
          const Sequence y = bits_to_seq(yb, ly);
          const std::int64_t want = brute_count(x, y);
          if (count_alignments_exact(x, y) != want) return false;
          const double lg = count_alignments(x, y);
          if (want == 0 && lg != kNegInf) return false;
          if (want > 0 &&
              std::abs(std::exp(lg) - static_cast<double>(want)) > 1e-6)
            return false;
          const auto dels = alignments_all_deletions_exact(x, y);
          for (int l = 0; l < ly; ++l)
            if (dels[l] != brute_count(x, y.without(l))) return false;
        }
    }
  // deletion-sum identity on random larger pairs, exact integers
  for (int it = 0; it < 200; ++it) {
    const int lx = 1 + static_cast<int>(rng.below(6));
    const int ly = lx + 1 + static_cast<int>(rng.below(10));
    Sequence x, y;
    for (int i = 0; i < lx; ++i)
      x.letters.push_back(static_cast<std::uint8_t>(rng.below(2)));
    for (int i = 0; i < ly; ++i)
      y.letters.push_back(static_cast<std::uint8_t>(rng.below(2)));
    BigInt sum = 0;
    for (const auto& c : alignments_all_deletions_exact(x, y)) sum += c;
    if (sum != BigInt(ly - lx) * count_alignments_exact(x, y)) return false;
  }
  return true;
}

bool check_forward_simulation(Rng& rng) {
  const RateSchedule sched{};
  const auto pi = InsertionDistribution::uniform(2);
  const Sequence x0 = Sequence::from_string("AB", Alphabet("AB"));
  const double t = 0.5;
  const double a = sched.alpha(t);
  const int n = 30000;

  std::map<std::int64_t, std::int64_t> m_hist, gap_hist;
  for (int i = 0; i < n; ++i) {
    const auto path = simulate_pure_birth(x0, t, sched, pi, rng);
    m_hist[static_cast<std::int64_t>(path.event_times.size())]++;
    for (auto g : path.gap_sizes) gap_hist[g]++;
  }

  // negative binomial with L+1 = 3 successes at probability alpha(t)
  std::vector<double> nb_pmf;
  for (int k = 0; k < 200; ++k)
    nb_pmf.push_back((k + 2) * (k + 1) / 2.0 * std::pow(a, 3) *
                     std::pow(1.0 - a, k));
  if (gof_pvalue(m_hist, n, nb_pmf) <= 0.01) return false;

  std::vector<double> geo_pmf;
  for (int k = 0; k < 200; ++k) geo_pmf.push_back(a * std::pow(1.0 - a, k));
  return gof_pvalue(gap_hist, 3.0 * n, geo_pmf) > 0.01;
}

bool check_posterior_paths(Rng& rng) {
  const Alphabet ab("AB");
  const auto pi = InsertionDistribution::uniform(2);
  const Sequence x0 = Sequence::from_string("AB", ab);
  const Sequence xt = Sequence::from_string("AABB", ab);
  const int m = 2;

  // jump chain conditioned on the endpoint: insert m letters one at a time
  // at uniform slots, keep runs that land on xt, record where the final
  // insertion sits
  std::vector<std::int64_t> hits(xt.size(), 0);
  std::int64_t accepted = 0;
  struct Tag {
    std::uint8_t letter;
    int event;
  };
  while (accepted < 3000) {
    std::vector<Tag> cur;
    for (int i = 0; i < x0.size(); ++i) cur.push_back({x0[i], 0});
    for (int e = 1; e <= m; ++e) {
      const auto slot = rng.below(static_cast<std::int64_t>(cur.size()) + 1);
      cur.insert(cur.begin() + slot,
                 {static_cast<std::uint8_t>(pi.sample(rng)), e});
    }
    bool match = cur.size() == xt.letters.size();
    for (std::size_t i = 0; match && i < cur.size(); ++i)
      match = cur[i].letter == xt[static_cast<int>(i)];
    if (!match) continue;
    ++accepted;
    for (std::size_t i = 0; i < cur.size(); ++i)
      if (cur[i].event == m) ++hits[i];
  }

  const auto target = target_distribution(x0, xt);
  double tv = 0.0;
  for (int l = 0; l < xt.size(); ++l) {
    const double p = target.log_probs[l] == kNegInf
                         ? 0.0
                         : std::exp(target.log_probs[l]);
    tv += std::abs(p - static_cast<double>(hits[l]) /
                           static_cast<double>(accepted));
  }
  return tv / 2.0 <= 0.05;
}

bool check_gradients(Rng& rng) {
  const Alphabet toy = Alphabet::toy();
  ContextModel model({.alphabet_size = 3,
                      .embed_dim = 4,
                      .m_buckets = 4,
                      .hidden_dim = 8,
                      .radius = 2});
  model.init_params(rng, 0.1);
  // random embeddings but a nonzero output layer, so every path is live
  auto par = model.params();
  for (int i = model.off_w2(); i < model.param_count(); ++i)
    par[i] = 0.1 * rng.normal();

  const auto pi = InsertionDistribution::uniform(3);
  LossSample ls;
  ls.x0 = Sequence::from_string("ABABAB", toy);
  ls.m_t = 3;
  ls.t = 0.5;
  ls.x_t = sample_xt_given_m(ls.x0, ls.m_t, pi, rng);
  ls.weight = RateSchedule{}.loss_weight(ls.m_t, ls.t);
  return gradient_check(model, ls, 50, 1e-5, rng) <= 1e-4;
}

bool check_prior_kl(Rng& rng) {
  const Alphabet ab("AB");
  const auto pi = InsertionDistribution::uniform(2);
  const Sequence x0 = Sequence::from_string("AB", ab);

  for (std::int64_t m1 : {1, 2, 3}) {
    // exact KL by enumerating every sequence of length 2 + m1
    const int len = 2 + static_cast<int>(m1);
    double exact = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      const Sequence x1 = bits_to_seq(bits, len);
      const double p = forward_likelihood(x0, x1, m1, pi);
      if (p <= 0.0) continue;
      exact += p * (std::log(p) - len * std::log(0.5));
    }
    const int ns = 4000;
    std::vector<double> draws(ns);
    double mean = 0.0;
    for (int i = 0; i < ns; ++i) {
      draws[i] = prior_kl_estimate(x0, m1, pi, 1, rng);
      mean += draws[i];
    }
    mean /= ns;
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= (ns - 1);
    const double sigma = std::sqrt(var / ns);
    if (std::abs(mean - exact) > 3.0 * sigma + 1e-9) return false;
  }

  // shrinking toward the prior: fitted slope over growing m1 is negative
  std::vector<double> ms, kls;
  for (std::int64_t m1 : {1, 2, 4, 8, 16}) {
    ms.push_back(static_cast<double>(m1));
    kls.push_back(prior_kl_estimate(x0, m1, pi, 4000, rng));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    mx += ms[i];
    my += kls[i];
  }
  mx /= ms.size();
  my /= ms.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    num += (ms[i] - mx) * (kls[i] - my);
    den += (ms[i] - mx) * (ms[i] - mx);
  }
  return num / den < 0.0;
}

}  // namespace

int run_selftest(std::uint64_t seed) {
  bool all = true;
  {
    Rng rng(mix_seed(seed, 1));
    all &= report("alignment counts match exhaustive enumeration",
                  check_alignment_counts(rng));
  }
  {
    Rng rng(mix_seed(seed, 2));
    all &= report("event-level simulation matches closed-form noising laws",
                  check_forward_simulation(rng));
  }
  {
    Rng rng(mix_seed(seed, 3));
    all &= report("deletion target matches conditioned insertion paths",
                  check_posterior_paths(rng));
  }
  {
    Rng rng(mix_seed(seed, 4));
    all &= report("analytic gradients match finite differences",
                  check_gradients(rng));
  }
  {
    Rng rng(mix_seed(seed, 5));
    all &= report("prior KL estimate matches enumeration and shrinks",
                  check_prior_kl(rng));
  }
  return all ? 0 : 2;
}

}  // namespace insdel
