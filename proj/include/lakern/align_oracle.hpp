#pragma once

// Exhaustive-enumeration oracle for la_kernel: walks every strictly
// increasing index pairing of the two sequences, scoring aligned pairs
// and internal gap runs directly from the definition. Exponential, so
// sequences are bounded; kept free of the five-state recurrence on
// purpose.

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lakern/align.hpp"

namespace lakern {

template <class Seq, class ScoreFn>
  requires ElementScorer<ScoreFn, Seq>
double la_kernel_bruteforce(const Seq& x, const Seq& y, ScoreFn&& d,
                            const AlignParams& params,
                            std::size_t max_len = 8) {
  params.validate();
  const std::size_t n = x.size(), m = y.size();
  if (n > max_len || m > max_len)
    throw std::invalid_argument("sequence exceeds brute-force bound " +
                                std::to_string(max_len));

  const auto gap_cost = [&](std::size_t run) {
    return run == 0 ? 0.0
                    : params.gap_open +
                          params.gap_extend * static_cast<double>(run - 1);
  };

  double total = 1.0;  // empty alignment
  // Depth-first over chains of aligned pairs; `score` is the alignment
  // score up to and including pair (i, j).
  auto extend = [&](auto&& self, std::size_t i, std::size_t j,
                    double score) -> void {
    for (std::size_t ni = i + 1; ni < n; ++ni) {
      for (std::size_t nj = j + 1; nj < m; ++nj) {
        const double s = score + d(x[ni], y[nj]) - gap_cost(ni - i - 1) -
                         gap_cost(nj - j - 1);
        total += std::exp(params.beta * s);
        self(self, ni, nj, s);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double s = d(x[i], y[j]);
      total += std::exp(params.beta * s);
      extend(extend, i, j, s);
    }
  }
  return total;
}

template <TokenSubstitution Subst>
double la_kernel_bruteforce(const PathSequence& x, const PathSequence& y,
                            const Subst& subst, const AlignParams& params,
                            std::size_t max_len = 8) {
  return la_kernel_bruteforce(
      x, y,
      [&](const Token& a, const Token& b) { return subst.lookup(a, b); },
      params, max_len);
}

}  // namespace lakern
