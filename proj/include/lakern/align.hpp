#pragma once

// Sequence alignment scores and the local alignment kernel.
//
// sw_score: best-local-alignment score, zero-clamped table, maximum
// over all cells.
// nw_score: global-alignment table with classical -i*G / -j*G borders,
// maximum over the last row and last column.
// la_kernel: sum of exp(beta * score) over every local alignment, the
// empty one included, so the value is always >= 1. Aligned pairs
// contribute exp(beta*d(a,b)); each internal gap run of length L in
// either sequence contributes exp(-beta*(o + e*(L-1))); unaligned
// prefixes and suffixes are free. Computed by the five-state dynamic
// program (match, gap-in-x, gap-in-y, and the two trailing-suffix
// accumulators), O(|x|*|y|) time.
//
// All three are templates over an element score function d(a,b), so
// they run both on Token sequences and on integer-coded sequences.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakern/token.hpp"

namespace lakern {

template <class ScoreFn, class Seq>
concept ElementScorer = requires(ScoreFn f, const Seq& s) {
  { f(s[0], s[0]) } -> std::convertible_to<double>;
};

template <class Subst>
concept TokenSubstitution = requires(const Subst& m, const Token& t) {
  { m.lookup(t, t) } -> std::convertible_to<double>;
};

struct AlignParams {
  double beta = 1.0;
  double gap_open = 1.2;
  double gap_extend = 0.2;

  void validate() const {
    if (!(beta >= 0.0))
      throw std::invalid_argument("beta must be >= 0");
    if (!(gap_open >= 0.0) || !(gap_extend >= 0.0))
      throw std::invalid_argument("gap costs must be >= 0");
  }

  // A gap extension above the opening cost is legal but rarely wanted.
  std::optional<std::string> warning() const {
    if (gap_extend > gap_open)
      return "gap extension (" + std::to_string(gap_extend) +
             ") exceeds gap opening (" + std::to_string(gap_open) + ")";
    return std::nullopt;
  }
};

template <class Seq, class ScoreFn>
  requires ElementScorer<ScoreFn, Seq>
double sw_score(const Seq& x, const Seq& y, ScoreFn&& d, double gap) {
  if (!(gap >= 0.0)) throw std::invalid_argument("gap cost must be >= 0");
  const std::size_t n = x.size(), m = y.size();
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  double best = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double v =
          std::max({0.0, prev[j - 1] + d(x[i - 1], y[j - 1]),
                    prev[j] - gap, cur[j - 1] - gap});
      cur[j] = v;
      best = std::max(best, v);
    }
    std::swap(prev, cur);
  }
  return best;
}

template <class Seq, class ScoreFn>
  requires ElementScorer<ScoreFn, Seq>
double nw_score(const Seq& x, const Seq& y, ScoreFn&& d, double gap) {
  if (!(gap >= 0.0)) throw std::invalid_argument("gap cost must be >= 0");
  const std::size_t n = x.size(), m = y.size();
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    prev[j] = -static_cast<double>(j) * gap;
  double best = prev[m];  // last column, row 0
  if (n == 0) return *std::max_element(prev.begin(), prev.end());
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = -static_cast<double>(i) * gap;
    for (std::size_t j = 1; j <= m; ++j)
      cur[j] = std::max({prev[j - 1] + d(x[i - 1], y[j - 1]),
                         prev[j] - gap, cur[j - 1] - gap});
    best = std::max(best, cur[m]);
    std::swap(prev, cur);
  }
  for (double v : prev) best = std::max(best, v);  // last row
  return best;
}

template <class Seq, class ScoreFn>
  requires ElementScorer<ScoreFn, Seq>
double la_kernel(const Seq& x, const Seq& y, ScoreFn&& d,
                 const AlignParams& params) {
  params.validate();
  const std::size_t n = x.size(), m = y.size();
  const double go = std::exp(-params.beta * params.gap_open);
  const double ge = std::exp(-params.beta * params.gap_extend);

  // M: alignments ending in an aligned pair at (i,j).
  // X: pending gap run in x after the last aligned pair; Y: likewise in
  // y (charged only if another pair follows, hence excluded at the end).
  // X2/Y2: closed alignments followed by free unaligned suffix.
  std::vector<double> pM(m + 1, 0.0), cM(m + 1, 0.0);
  std::vector<double> pX(m + 1, 0.0), cX(m + 1, 0.0);
  std::vector<double> pY(m + 1, 0.0), cY(m + 1, 0.0);
  std::vector<double> pX2(m + 1, 0.0), cX2(m + 1, 0.0);
  std::vector<double> pY2(m + 1, 0.0), cY2(m + 1, 0.0);

  for (std::size_t i = 1; i <= n; ++i) {
    cM[0] = cX[0] = cY[0] = cX2[0] = cY2[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double a = std::exp(params.beta * d(x[i - 1], y[j - 1]));
      cM[j] = a * (1.0 + pX[j - 1] + pY[j - 1] + pM[j - 1]);
      cX[j] = go * pM[j] + ge * pX[j];
      cY[j] = go * (cM[j - 1] + cX[j - 1]) + ge * cY[j - 1];
      cX2[j] = pM[j] + pX2[j];
      cY2[j] = cM[j - 1] + cX2[j - 1] + cY2[j - 1];
    }
    std::swap(pM, cM);
    std::swap(pX, cX);
    std::swap(pY, cY);
    std::swap(pX2, cX2);
    std::swap(pY2, cY2);
  }
  return 1.0 + pX2[m] + pY2[m] + pM[m];
}

// Token-level conveniences over a substitution lookup object (anything
// with lookup(Token, Token)) or plain match/mismatch scoring.

template <TokenSubstitution Subst>
double sw_score(const PathSequence& x, const PathSequence& y,
                const Subst& subst, double gap) {
  return sw_score(x, y,
                  [&](const Token& a, const Token& b) {
                    return subst.lookup(a, b);
                  },
                  gap);
}

template <TokenSubstitution Subst>
double nw_score(const PathSequence& x, const PathSequence& y,
                const Subst& subst, double gap) {
  return nw_score(x, y,
                  [&](const Token& a, const Token& b) {
                    return subst.lookup(a, b);
                  },
                  gap);
}

template <TokenSubstitution Subst>
double la_kernel(const PathSequence& x, const PathSequence& y,
                 const Subst& subst, const AlignParams& params) {
  return la_kernel(x, y,
                   [&](const Token& a, const Token& b) {
                     return subst.lookup(a, b);
                   },
                   params);
}

// Uniform match/mismatch scoring on exact token identity.
struct MatchMismatch {
  double match = 2.0;
  double mismatch = -1.0;
  double operator()(const Token& a, const Token& b) const {
    return a.key() == b.key() ? match : mismatch;
  }
};

}  // namespace lakern
