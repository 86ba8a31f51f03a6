#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "insdel/seq.hpp"

namespace insdel {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b) with -inf as the additive identity
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(a > b ? a - b : b - a)));
}

using BigInt = boost::multiprecision::cpp_int;

// Number of distinct index sets under which x occurs in y as a subsequence,
// returned as a log count (-inf when none). ali("AB", "AABB") = 4.
double count_alignments(const Sequence& x, const Sequence& y);

// Exact big-integer count; oracle for the log-space kernel. Refuses |y| > 64
// (combinatorial blowup guard).
BigInt count_alignments_exact(const Sequence& x, const Sequence& y);

// Log counts ali(x0, xt with position l deleted) for every l in one
// O(|x0| * |xt|) pass: an embedding avoiding position l splits uniquely into
// a prefix of x0 embedded left of l and the remaining suffix embedded right
// of l, so entry l is a dot product of prefix and suffix embedding counts.
std::vector<double> alignments_all_deletions(const Sequence& x0,
                                             const Sequence& xt);

std::vector<BigInt> alignments_all_deletions_exact(const Sequence& x0,
                                                   const Sequence& xt);

}  // namespace insdel
