#include "insdel/align.hpp"

#include <stdexcept>

namespace insdel {

namespace {

// Log-domain nonnegative real; + is log-sum-exp, * adds logs. Lets the
// counting kernels run unchanged in floating log space or exact integers.
struct LogReal {
  double lg = kNegInf;
  friend LogReal operator+(LogReal a, LogReal b) {
    return {log_add(a.lg, b.lg)};
  }
  friend LogReal operator*(LogReal a, LogReal b) { return {a.lg + b.lg}; }
  LogReal& operator+=(LogReal b) {
    lg = log_add(lg, b.lg);
    return *this;
  }
};

template <class Num>
Num one();
template <>
LogReal one<LogReal>() {
  return {0.0};
}
template <>
BigInt one<BigInt>() {
  return 1;
}

// f[a] = #embeddings of x[0, a) into the scanned prefix of y
template <class Num>
Num embed_count(const Sequence& x, const Sequence& y) {
  const int lx = x.size();
  std::vector<Num> f(lx + 1);
  f[0] = one<Num>();
  for (int j = 0; j < y.size(); ++j) {
    // descending a so f[a-1] is still the previous column's value
    const int hi = std::min(lx, j + 1);
    for (int a = hi; a >= 1; --a)
      if (x[a - 1] == y[j]) f[a] = f[a] + f[a - 1];
  }
  return f[lx];
}

// P[j][a] = #embeddings of x0[0, a) into xt[0, j)
// S[j][a] = #embeddings of x0[a, L) into xt[j, N)
// ali(x0, xt minus position l) = sum_a P[l][a] * S[l+1][a]
template <class Num>
std::vector<Num> all_deletions(const Sequence& x0, const Sequence& xt) {
  const int l0 = x0.size();
  const int n = xt.size();
  if (n < 1)
    throw std::invalid_argument("alignments_all_deletions: xt is empty");

  std::vector<std::vector<Num>> p(n + 1, std::vector<Num>(l0 + 1));
  p[0][0] = one<Num>();
  for (int j = 1; j <= n; ++j) {
    p[j][0] = one<Num>();
    for (int a = 1; a <= l0; ++a) {
      p[j][a] = p[j - 1][a];
      if (x0[a - 1] == xt[j - 1]) p[j][a] = p[j][a] + p[j - 1][a - 1];
    }
  }

  std::vector<std::vector<Num>> s(n + 1, std::vector<Num>(l0 + 1));
  for (int j = 0; j <= n; ++j) s[j][l0] = one<Num>();
  for (int j = n - 1; j >= 0; --j)
    for (int a = l0 - 1; a >= 0; --a) {
      s[j][a] = s[j + 1][a];
      if (x0[a] == xt[j]) s[j][a] = s[j][a] + s[j + 1][a + 1];
    }

  std::vector<Num> out(n);
  for (int l = 0; l < n; ++l) {
    Num acc{};
    for (int a = 0; a <= l0; ++a) acc = acc + p[l][a] * s[l + 1][a];
    out[l] = acc;
  }
  return out;
}

}  // namespace

double count_alignments(const Sequence& x, const Sequence& y) {
  return embed_count<LogReal>(x, y).lg;
}

BigInt count_alignments_exact(const Sequence& x, const Sequence& y) {
  if (y.size() > 64)
    throw std::invalid_argument("count_alignments_exact: |y| > 64");
  return embed_count<BigInt>(x, y);
}

std::vector<double> alignments_all_deletions(const Sequence& x0,
                                             const Sequence& xt) {
  auto counts = all_deletions<LogReal>(x0, xt);
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i].lg;
  return out;
}

std::vector<BigInt> alignments_all_deletions_exact(const Sequence& x0,
                                                   const Sequence& xt) {
  if (xt.size() > 64)
    throw std::invalid_argument("alignments_all_deletions_exact: |xt| > 64");
  return all_deletions<BigInt>(x0, xt);
}

}  // namespace insdel
