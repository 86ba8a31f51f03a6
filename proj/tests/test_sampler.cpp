#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "doctest.h"
#include "insdel/align.hpp"
#include "insdel/denoiser.hpp"
#include "insdel/objective.hpp"
#include "insdel/rng.hpp"
#include "insdel/sampler.hpp"
#include "insdel/schedule.hpp"
#include "insdel/seq.hpp"
#include "test_helpers.hpp"

using namespace insdel;
using namespace insdel::testing;

namespace {

const Alphabet kToy = Alphabet::toy();

struct CountingModel final : DenoiserModel {
  mutable int calls = 0;
  mutable int first_len = -1;
  DeletionDistribution predict(const Sequence& x, std::int64_t) const override {
    ++calls;
    if (first_len < 0) first_len = x.size();
    return DeletionDistribution::uniform(x.size());
  }
};

ContextModel random_model(std::uint64_t seed) {
  ContextModel m(ContextModelConfig{.alphabet_size = 3, .embed_dim = 4,
                                    .m_buckets = 4, .hidden_dim = 8,
                                    .radius = 2});
  Rng rng(seed);
  for (double& v : m.params()) v = 0.3 * rng.normal();
  return m;
}

// original-sequence indices removed by the trace, in deletion order
std::vector<int> removed_original(const ShrinkTrace& tr) {
  std::vector<int> idx(tr.initial.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> removed;
  for (const auto& st : tr.steps) {
    removed.push_back(idx[st.position]);
    idx.erase(idx.begin() + st.position);
  }
  return removed;
}

void check_trace(const ShrinkTrace& tr, const Sequence& x,
                 const Sequence& out, std::int64_t m) {
  CHECK(tr.initial == x);
  CHECK(tr.final == out);
  REQUIRE(tr.steps.size() == static_cast<std::size_t>(m));
  Sequence replay = tr.initial;
  for (const auto& st : tr.steps) {
    REQUIRE(st.position >= 0);
    REQUIRE(st.position < replay.size());
    CHECK(replay[st.position] == st.letter);
    CHECK(st.log_prob <= 1e-12);
    replay = replay.without(st.position);
  }
  CHECK(replay == out);
}

}  // namespace

TEST_CASE("generation on a single-letter alphabet is deterministic") {
  const Alphabet one("A");
  const auto pi = InsertionDistribution::uniform(1);
  const UniformDenoiser u;
  Rng rng(2);
  for (int corrector : {0, 2})
    for (int rep = 0; rep < 20; ++rep) {
      const auto out = generate(4, u, RateSchedule{}, pi, corrector, 0, rng);
      CHECK(out.to_string(one) == "AAAA");
    }
  CHECK_THROWS_WITH(generate(0, u, RateSchedule{}, pi, 0, 0, rng),
                    doctest::Contains("length must be >= 1"));
  CHECK_THROWS_WITH(generate(3, u, RateSchedule{}, pi, -1, 0, rng),
                    doctest::Contains("corrector_steps must be >= 0"));
}

TEST_CASE("generation always lands on the requested length") {
  const auto pi = InsertionDistribution::uniform(3);
  const auto model = random_model(8);
  Rng rng(3);
  for (int length : {1, 3, 8})
    for (int corrector : {0, 2})
      for (int rep = 0; rep < 15; ++rep) {
        const auto out =
            generate(length, model, RateSchedule{}, pi, corrector, 16, rng);
        REQUIRE(out.size() == length);
        for (int i = 0; i < out.size(); ++i) CHECK(out[i] < 3);
      }
}

TEST_CASE("generation spends exactly M(K+1) model calls") {
  const auto pi = InsertionDistribution::uniform(3);
  Rng rng(19);
  const int L = 5;
  for (int corrector : {0, 1, 3})
    for (int rep = 0; rep < 25; ++rep) {
      CountingModel counter;
      generate(L, counter, RateSchedule{}, pi, corrector, 0, rng);
      if (counter.calls == 0) continue;  // M = 0 draw
      const int m = counter.first_len - L;
      CHECK(counter.calls == m * (corrector + 1));
    }
}

TEST_CASE("shrinking yields audited subsequences in both modes") {
  const auto model = random_model(23);
  Rng rng(5);
  for (int rep = 0; rep < 60; ++rep) {
    Sequence x;
    const int n = 8 + static_cast<int>(rng.below(7));
    for (int i = 0; i < n; ++i)
      x.letters.push_back(static_cast<std::uint8_t>(rng.below(3)));
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng.below(n - 1));
    const auto mode = rep % 2 == 0 ? ShrinkMode::sample : ShrinkMode::greedy;
    const auto [out, trace] = shrink(x, m, model, mode, 8, rng);
    CHECK(out.size() == n - m);
    CHECK(is_subsequence(out, x));
    check_trace(trace, x, out, m);
  }

  Rng r2(6);
  CHECK_THROWS_WITH(shrink(seq("AB", kToy), 2, model, ShrinkMode::sample, 0, r2),
                    doctest::Contains("need 1 <= m < |x|"));
  CHECK_THROWS_WITH(shrink(seq("AB", kToy), 0, model, ShrinkMode::sample, 0, r2),
                    doctest::Contains("need 1 <= m < |x|"));
}

TEST_CASE("greedy shrinking ignores the rng entirely") {
  const auto model = random_model(31);
  Sequence x = seq("ABCABCABCA", kToy);
  Rng r1(100), r2(9999);
  const auto [a, ta] = shrink(x, 4, model, ShrinkMode::greedy, 0, r1);
  const auto [b, tb] = shrink(x, 4, model, ShrinkMode::greedy, 0, r2);
  CHECK(a == b);
  REQUIRE(ta.steps.size() == tb.steps.size());
  for (std::size_t i = 0; i < ta.steps.size(); ++i) {
    CHECK(ta.steps[i].position == tb.steps[i].position);
    CHECK(ta.steps[i].log_prob == tb.steps[i].log_prob);
  }

  // uniform model: argmax tie-break deletes position 0 every step
  const UniformDenoiser u;
  Rng r3(1);
  const auto [g, tg] = shrink(seq("ABAB", kToy), 2, u, ShrinkMode::greedy, 0, r3);
  CHECK(g.to_string(kToy) == "AB");
  CHECK(tg.steps[0].position == 0);
  CHECK(tg.steps[1].position == 0);
}

TEST_CASE("uniform-model shrinking is uniform over deleted position sets") {
  const UniformDenoiser u;
  const Sequence x = seq("ABCAB", kToy);
  Rng rng(26);
  const int n = 20000;
  std::map<std::pair<int, int>, int> hist;
  for (int i = 0; i < n; ++i) {
    const auto [out, trace] = shrink(x, 2, u, ShrinkMode::sample, 0, rng);
    auto rem = removed_original(trace);
    std::sort(rem.begin(), rem.end());
    hist[{rem[0], rem[1]}]++;
  }
  REQUIRE(hist.size() == 10);  // C(5,2) distinct pairs
  const double expected = n / 10.0;
  double stat = 0.0;
  for (const auto& [pair, count] : hist) {
    const double d = count - expected;
    stat += d * d / expected;
  }
  CHECK(chi_square_pvalue(stat, 9) > 0.01);
}

TEST_CASE("k-step deletions are distinct, in range, and correctly lawful") {
  const auto model = random_model(44);
  const Sequence x = seq("ABCABC", kToy);
  Rng rng(47);

  for (int k = 1; k <= 4; ++k) {
    const auto picks = k_gillespie_deletions(x, 4, model, k, 0, rng);
    REQUIRE(picks.size() == static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < picks.size(); ++i) {
      CHECK(picks[i] >= 0);
      CHECK(picks[i] < x.size());
      for (std::size_t j = i + 1; j < picks.size(); ++j)
        CHECK(picks[i] != picks[j]);
    }
  }

  CHECK_THROWS_WITH(k_gillespie_deletions(x, 4, model, 0, 0, rng),
                    doctest::Contains("need 1 <= k <= min"));
  CHECK_THROWS_WITH(k_gillespie_deletions(x, 2, model, 3, 0, rng),
                    doctest::Contains("need 1 <= k <= min"));
  CHECK_THROWS_WITH(k_gillespie_deletions(x, 8, model, 6, 0, rng),
                    doctest::Contains("need 1 <= k <= min"));

  // k = 1 draws from exactly the model's predicted distribution
  const auto dist = model.predict(x, 3);
  const int n = 30000;
  std::vector<int> freq(x.size(), 0);
  for (int i = 0; i < n; ++i)
    freq[k_gillespie_deletions(x, 3, model, 1, 0, rng)[0]]++;
  for (int l = 0; l < x.size(); ++l) {
    const double p = std::exp(dist.log_probs[l]);
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(freq[l] / static_cast<double>(n) - p) <= 3.5 * sigma);
  }
}

TEST_CASE("batched shrinking trades calls for the same guarantees") {
  const auto model = random_model(52);
  Rng rng(61);
  for (int rep = 0; rep < 40; ++rep) {
    Sequence x;
    const int n = 9 + static_cast<int>(rng.below(5));
    for (int i = 0; i < n; ++i)
      x.letters.push_back(static_cast<std::uint8_t>(rng.below(3)));
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng.below(n - 1));
    const int k = 1 + static_cast<int>(rng.below(4));
    const auto [out, trace] = shrink_k(x, m, model, k, 8, rng);
    CHECK(out.size() == n - m);
    CHECK(is_subsequence(out, x));
    check_trace(trace, x, out, m);
  }

  // k >= m and a view that stays longer than 1: exactly one model call
  CountingModel counter;
  Rng r2(5);
  const Sequence x = seq("ABCABCAB", kToy);
  const auto [out, trace] = shrink_k(x, 3, counter, 3, 0, r2);
  CHECK(counter.calls == 1);
  CHECK(out.size() == 5);
  check_trace(trace, x, out, 3);

  Rng r3(5);
  CHECK_THROWS_WITH(shrink_k(x, 0, counter, 1, 0, r3),
                    doctest::Contains("need 1 <= m < |x|"));
  CHECK_THROWS_WITH(shrink_k(x, 2, counter, 0, 0, r3),
                    doctest::Contains("k must be >= 1"));
}
