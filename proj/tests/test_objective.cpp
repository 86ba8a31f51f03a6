#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "insdel/align.hpp"
#include "insdel/denoiser.hpp"
#include "insdel/forward.hpp"
#include "insdel/objective.hpp"
#include "insdel/rng.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"
#include "test_helpers.hpp"

using namespace insdel;
using namespace insdel::testing;

namespace {

const Alphabet kToy = Alphabet::toy();

// Always answers with the exact posterior; lets denoising_kl hit its zero.
struct OracleModel final : DenoiserModel {
  Sequence x0;
  DeletionDistribution predict(const Sequence& x, std::int64_t) const override {
    return target_distribution(x0, x);
  }
};

struct Tagged {
  std::uint8_t letter;
  int tag;  // 0 for clean letters, insertion order otherwise
};

// Exhaustive tagged jump-chain enumeration: every insertion path of length m
// (uniform slot, letter ~ pi), recording endpoint mass and the mass broken
// down by the final position of the LAST inserted letter. The conditional
// law of that position given the endpoint is what target_distribution claims
// to compute.
void enum_paths(std::vector<Tagged>& cur, int step, int m,
                const InsertionDistribution& pi, double prob,
                const Alphabet& a, std::map<std::string, double>& total,
                std::map<std::pair<std::string, int>, double>& by_last) {
  if (step == m) {
    std::string s;
    int last = -1;
    for (int i = 0; i < static_cast<int>(cur.size()); ++i) {
      s += a.symbol(cur[i].letter);
      if (cur[i].tag == m) last = i;
    }
    total[s] += prob;
    by_last[{s, last}] += prob;
    return;
  }
  const int slots = static_cast<int>(cur.size()) + 1;
  for (int slot = 0; slot < slots; ++slot)
    for (int letter = 0; letter < pi.size(); ++letter) {
      cur.insert(cur.begin() + slot,
                 Tagged{static_cast<std::uint8_t>(letter), step + 1});
      enum_paths(cur, step + 1, m, pi, prob / slots * pi.p[letter], a, total,
                 by_last);
      cur.erase(cur.begin() + slot);
    }
}

}  // namespace

TEST_CASE("deletion distribution basics") {
  const auto u = DeletionDistribution::uniform(4);
  REQUIRE(u.size() == 4);
  for (double lp : u.log_probs)
    CHECK(lp == doctest::Approx(-std::log(4.0)).epsilon(1e-12));
  CHECK(std::abs(u.log_sum()) <= 1e-9);
  CHECK_THROWS_WITH(DeletionDistribution::uniform(0),
                    doctest::Contains("empty deletion distribution"));

  // argmax ties break to the lowest index
  const DeletionDistribution tied{
      {std::log(0.4), std::log(0.1), std::log(0.4), std::log(0.1)}};
  CHECK(tied.argmax() == 0);
  CHECK(u.argmax() == 0);
  const DeletionDistribution peaked{{std::log(0.1), std::log(0.9)}};
  CHECK(peaked.argmax() == 1);

  Rng rng(13);
  const DeletionDistribution biased{{std::log(0.7), std::log(0.3)}};
  const int n = 20000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += biased.sample(rng) == 0 ? 1 : 0;
  CHECK(std::abs(zeros / static_cast<double>(n) - 0.7) <=
        3.0 * std::sqrt(0.7 * 0.3 / n));
}

TEST_CASE("frozen posterior targets") {
  const Alphabet ab("AB");
  const auto t1 = target_distribution(seq("A", ab), seq("AB", ab));
  REQUIRE(t1.size() == 2);
  CHECK(t1.log_probs[0] == kNegInf);
  CHECK(t1.log_probs[1] == doctest::Approx(0.0).epsilon(1e-12));

  const auto t2 = target_distribution(seq("A", ab), seq("AA", ab));
  CHECK(std::exp(t2.log_probs[0]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(t2.log_probs[1]) == doctest::Approx(0.5).epsilon(1e-12));

  const auto t3 = target_distribution(seq("AAA", ab), seq("AAAAA", ab));
  REQUIRE(t3.size() == 5);
  for (double lp : t3.log_probs)
    CHECK(std::exp(lp) == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_WITH(target_distribution(seq("AB", ab), seq("AB", ab)),
                    doctest::Contains("needs |xt| > |x0|"));
  CHECK_THROWS_WITH(target_distribution(seq("AB", ab), seq("BAA", ab)),
                    doctest::Contains("does not contain x0 as a subsequence"));
}

TEST_CASE("posterior normalizes for every reachable pair") {
  for (int lx = 0; lx <= 4; ++lx)
    for (int ly = lx + 1; ly <= 8; ++ly)
      for (std::uint32_t bx = 0; bx < (1u << lx); ++bx)
        for (std::uint32_t by = 0; by < (1u << ly); ++by) {
          const Sequence x0 = bits_to_seq(bx, lx), xt = bits_to_seq(by, ly);
          if (count_alignments(x0, xt) == kNegInf) continue;
          const auto t = target_distribution(x0, xt);
          REQUIRE(t.size() == ly);
          CHECK(std::abs(t.log_sum()) <= 1e-9);
          for (double lp : t.log_probs) CHECK(lp <= 1e-12);
        }
}

TEST_CASE("posterior equals the exact last-insertion law of the jump chain") {
  const Alphabet ab("AB");
  // non-uniform letters on purpose: the pi factors must cancel in the
  // conditional, leaving the pure alignment-count ratio
  const auto pi = InsertionDistribution::explicit_probs({0.3, 0.7});
  for (const std::string& x0s : {"A", "B", "AB", "BA", "AA"}) {
    const Sequence x0 = seq(x0s, ab);
    for (int m = 1; m <= 3; ++m) {
      std::vector<Tagged> cur;
      for (int i = 0; i < x0.size(); ++i) cur.push_back(Tagged{x0[i], 0});
      std::map<std::string, double> total;
      std::map<std::pair<std::string, int>, double> by_last;
      enum_paths(cur, 0, m, pi, 1.0, ab, total, by_last);

      for (const auto& [xts, mass] : total) {
        const Sequence xt = seq(xts, ab);
        const auto target = target_distribution(x0, xt);
        for (int l = 0; l < xt.size(); ++l) {
          const auto it = by_last.find({xts, l});
          const double want = it == by_last.end() ? 0.0 : it->second / mass;
          CHECK(std::abs(std::exp(target.log_probs[l]) - want) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("kl divergence conventions") {
  const DeletionDistribution u = DeletionDistribution::uniform(2);
  const DeletionDistribution point{{0.0, kNegInf}};
  CHECK(kl_divergence(u, u) == 0.0);
  CHECK(kl_divergence(point, u) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isinf(kl_divergence(u, point)));  // q = 0 where p > 0
  CHECK_THROWS_WITH(kl_divergence(u, DeletionDistribution::uniform(3)),
                    doctest::Contains("size mismatch"));

  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(6));
    std::vector<double> pw(n), qw(n);
    double ps = 0.0, qs = 0.0;
    for (int i = 0; i < n; ++i) {
      pw[i] = rng.u01_open();
      qw[i] = rng.u01_open();
      ps += pw[i];
      qs += qw[i];
    }
    DeletionDistribution p, q;
    for (int i = 0; i < n; ++i) {
      p.log_probs.push_back(std::log(pw[i] / ps));
      q.log_probs.push_back(std::log(qw[i] / qs));
    }
    CHECK(kl_divergence(p, q) >= 0.0);
  }
}

TEST_CASE("denoising kl zeros and the uniform gap") {
  const Alphabet one("A");
  const UniformDenoiser uniform;

  // single-letter alphabet: target is uniform, so the uniform model is exact
  NoisedSample s;
  s.t = 0.5;
  s.m_t = 3;
  s.x_t = seq("AAAAA", one);
  CHECK(std::abs(denoising_kl(seq("AA", one), s, uniform)) <= 1e-12);

  // model == target -> 0 on a structured instance
  const Alphabet ab("AB");
  OracleModel oracle;
  oracle.x0 = seq("AB", ab);
  NoisedSample s2;
  s2.t = 0.4;
  s2.m_t = 2;
  s2.x_t = seq("AABB", ab);
  CHECK(denoising_kl(oracle.x0, s2, oracle) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // point-mass target vs uniform over 2 positions
  NoisedSample s3;
  s3.t = 0.3;
  s3.m_t = 1;
  s3.x_t = seq("AB", ab);
  CHECK(denoising_kl(seq("A", ab), s3, uniform) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("windowed distribution lifting") {
  const DeletionDistribution raw{{std::log(0.9), std::log(0.1)}};
  const auto lifted = windowed_distribution(raw, 1, 4);
  REQUIRE(lifted.size() == 4);
  CHECK(std::exp(lifted.log_probs[0]) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::exp(lifted.log_probs[1]) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(std::exp(lifted.log_probs[2]) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(std::exp(lifted.log_probs[3]) == doctest::Approx(0.25).epsilon(1e-12));

  // full-coverage window is the identity
  const auto same = windowed_distribution(raw, 0, 2);
  CHECK(same.log_probs == raw.log_probs);

  CHECK_THROWS_WITH(windowed_distribution(raw, -1, 4),
                    doctest::Contains("window out of range"));
  CHECK_THROWS_WITH(windowed_distribution(raw, 3, 4),
                    doctest::Contains("window out of range"));

  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const int full = 2 + static_cast<int>(rng.below(10));
    const int w = 1 + static_cast<int>(rng.below(full));
    const int start = static_cast<int>(rng.below(full - w + 1));
    DeletionDistribution win;
    double total = 0.0;
    std::vector<double> weights(w);
    for (int i = 0; i < w; ++i) {
      weights[i] = rng.u01_open();
      total += weights[i];
    }
    for (int i = 0; i < w; ++i)
      win.log_probs.push_back(std::log(weights[i] / total));
    const auto out = windowed_distribution(win, start, full);
    REQUIRE(out.size() == full);
    CHECK(std::abs(out.log_sum()) <= 1e-9);
  }
}

TEST_CASE("windowing obeys the mixture lower bound") {
  // Jensen: averaging KL(target || lifted window prediction) over window
  // starts can never fall below the KL against the averaged prediction.
  ContextModel model(
      ContextModelConfig{.alphabet_size = 3, .embed_dim = 4, .m_buckets = 4,
                         .radius = 2});
  Rng rng(23);
  for (double& v : model.params()) v = 0.3 * rng.normal();

  const Sequence x0 = seq("ABAB", kToy);
  const Sequence xt = seq("CABCACBABBCA", kToy);
  REQUIRE(is_subsequence(x0, xt));
  const auto p = target_distribution(x0, xt);

  const int full = xt.size(), w = 5;
  const std::int64_t m = full - x0.size();
  std::vector<DeletionDistribution> lifted;
  for (int start = 0; start + w <= full; ++start) {
    Sequence crop;
    crop.letters.assign(xt.letters.begin() + start,
                        xt.letters.begin() + start + w);
    lifted.push_back(windowed_distribution(model.predict(crop, m), start, full));
  }

  DeletionDistribution mixture;
  double mean_kl = 0.0;
  for (int l = 0; l < full; ++l) {
    double acc = 0.0;
    for (const auto& q : lifted) acc += std::exp(q.log_probs[l]);
    mixture.log_probs.push_back(std::log(acc / lifted.size()));
  }
  for (const auto& q : lifted) mean_kl += kl_divergence(p, q) / lifted.size();
  CHECK(mean_kl + 1e-12 >= kl_divergence(p, mixture));
  CHECK(std::abs(mixture.log_sum()) <= 1e-9);
}

TEST_CASE("prior kl estimator closed forms") {
  const Alphabet ab("AB");
  Rng rng(3);
  const auto pi = InsertionDistribution::explicit_probs({0.25, 0.75});

  // m1 = 0: X1 is x0 itself; the estimator is -sum log pi(x0_i) per draw.
  // (KL between the point mass on x0 and iid-pi of the same length.)
  const double want = -(std::log(0.25) + std::log(0.75));
  for (int rep = 0; rep < 10; ++rep)
    CHECK(prior_kl_estimate(seq("AB", ab), 0, pi, 1, rng) ==
          doctest::Approx(want).epsilon(1e-12));

  // single-letter alphabet: binomial and pi terms cancel exactly at any m1
  const Alphabet one("A");
  const auto pi1 = InsertionDistribution::uniform(1);
  for (std::int64_t m1 : {0, 1, 5, 17})
    CHECK(prior_kl_estimate(seq("AAA", one), m1, pi1, 3, rng) ==
          doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS(prior_kl_estimate(seq("A", ab), -1, pi, 1, rng));
  CHECK_THROWS(prior_kl_estimate(seq("A", ab), 1, pi, 0, rng));
}

TEST_CASE("prior kl estimator matches exhaustive enumeration") {
  const Alphabet ab("AB");
  Rng rng(29);
  for (const auto& pi :
       {InsertionDistribution::uniform(2),
        InsertionDistribution::explicit_probs({0.4, 0.6})}) {
    for (std::int64_t m1 : {1, 2, 3}) {
      const Sequence x0 = seq("AB", ab);
      const auto [kl, var] = prior_kl_exact(x0, m1, pi);
      CHECK(kl >= 0.0);
      const int n = 4000;
      const double got = prior_kl_estimate(x0, m1, pi, n, rng);
      CHECK(std::abs(got - kl) <= 3.0 * std::sqrt(var / n) + 1e-12);
    }
  }
}

TEST_CASE("prior kl shrinks as the horizon noise grows") {
  const Alphabet ab("AB");
  Rng rng(101);
  const auto pi = InsertionDistribution::uniform(2);
  const Sequence x0 = seq("AB", ab);
  std::vector<double> xs, ys;
  for (std::int64_t m1 : {1, 2, 4, 8, 16, 32}) {
    xs.push_back(static_cast<double>(m1));
    ys.push_back(prior_kl_estimate(x0, m1, pi, 2000, rng));
  }
  CHECK(ols_slope(xs, ys) < 0.0);
  for (double y : ys) CHECK(y >= -0.05);  // nonnegative up to MC noise
}

TEST_CASE("elbo is exactly zero for the solvable single-letter problem") {
  const Alphabet one("A");
  const auto pi = InsertionDistribution::uniform(1);
  const UniformDenoiser uniform;
  Rng rng(55);
  const auto rep = elbo(seq("AAAA", one), uniform, RateSchedule{}, pi, 25, 0, rng);
  CHECK(std::abs(rep.nll_per_token) <= 1e-9);
  CHECK(rep.perplexity == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(rep.prior_kl) <= 1e-9);
  CHECK(std::abs(rep.denoising_term) <= 1e-9);
  CHECK(rep.n_samples == 25);
}

TEST_CASE("elbo report wiring and validation") {
  const auto pi = InsertionDistribution::uniform(3);
  const UniformDenoiser uniform;
  Rng rng(70);
  const auto rep = elbo(seq("ABAB", kToy), uniform, RateSchedule{}, pi, 10, 64, rng);
  CHECK(rep.perplexity == doctest::Approx(std::exp(rep.nll_per_token)).epsilon(1e-12));
  CHECK(std::isfinite(rep.nll_per_token));
  CHECK(rep.nll_per_token > 0.0);

  CHECK_THROWS(elbo(Sequence{}, uniform, RateSchedule{}, pi, 10, 0, rng));
  CHECK_THROWS(elbo(seq("AB", kToy), uniform, RateSchedule{}, pi, 0, 0, rng));
}

TEST_CASE("uniform model perplexity sits in the untrained band") {
  const auto pi = InsertionDistribution::uniform(3);
  const UniformDenoiser uniform;
  Rng corpus_rng(2024);
  const Corpus toy = toy_corpus(20, 20, corpus_rng);
  Rng rng(91);
  double nll = 0.0;
  std::int64_t tokens = 0;
  for (const auto& x0 : toy.sequences) {
    const auto rep = elbo(x0, uniform, RateSchedule{}, pi, 50, 64, rng);
    nll += rep.nll_per_token * x0.size();
    tokens += x0.size();
  }
  const double ppl = std::exp(nll / tokens);
  CHECK(ppl >= 2.8);
  CHECK(ppl <= 3.8);
}
