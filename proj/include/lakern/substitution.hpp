#pragma once

// Token-level substitution function d'(a,b): word pairs score from a
// stored [0,1] table, edge tokens require an exact surface+direction
// match, mixed word/edge pairs score 0 and every token substitutes for
// itself at 1. Baseline II draws uniformly random word-pair scores.
//
// File format (TSV): header `#subst-matrix v1`, then one unordered pair
// per line `word_a TAB word_b TAB score`; self-pairs are implicit 1.

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakern/rng.hpp"
#include "lakern/token.hpp"
#include "lakern/word_scores.hpp"

namespace lakern {

namespace detail {

inline void write_score(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
  out.write(buf, ptr - buf);
}

}  // namespace detail

class SubstitutionMatrix {
 public:
  SubstitutionMatrix() = default;

  // Wraps a symmetric word table; self-pairs are forced to 1.
  static SubstitutionMatrix build(WordPairScores word_scores) {
    SubstitutionMatrix m;
    m.scores_ = std::move(word_scores);
    std::vector<std::string> self_fixes;
    for (const auto& [pair, score] : m.scores_)
      if (pair.first == pair.second && score != 1.0)
        self_fixes.push_back(pair.first);
    for (const auto& w : self_fixes) m.scores_.set(w, w, 1.0);
    return m;
  }

  // Baseline II: one independent uniform [0,1] draw per unordered word
  // pair, deterministic for a fixed seed; self-pairs stay 1.
  static SubstitutionMatrix random(std::vector<std::string> vocabulary,
                                   std::uint64_t seed) {
    std::sort(vocabulary.begin(), vocabulary.end());
    vocabulary.erase(
        std::unique(vocabulary.begin(), vocabulary.end()),
        vocabulary.end());
    Rng rng(seed);
    WordPairScores scores;
    for (std::size_t i = 0; i < vocabulary.size(); ++i)
      for (std::size_t j = i + 1; j < vocabulary.size(); ++j)
        scores.set(vocabulary[i], vocabulary[j], uniform_unit(rng));
    return build(std::move(scores));
  }

  // Total over all token pairs; never fails.
  double lookup(const Token& a, const Token& b) const {
    if (a.is_word() && b.is_word()) {
      const std::string ka = a.key(), kb = b.key();
      if (ka == kb) return 1.0;
      return scores_.get(ka, kb).value_or(0.0);
    }
    if (a.is_edge() && b.is_edge())
      return (a.direction == b.direction && a.surface == b.surface) ? 1.0
                                                                    : 0.0;
    return 0.0;
  }

  double word_score(const std::string& a, const std::string& b) const {
    if (a == b) return 1.0;
    return scores_.get(a, b).value_or(0.0);
  }

  const WordPairScores& word_scores() const { return scores_; }

  void save(std::ostream& out) const {
    out << "#subst-matrix v1\n";
    for (const auto& [pair, score] : scores_) {
      if (pair.first == pair.second) continue;
      out << pair.first << '\t' << pair.second << '\t';
      detail::write_score(out, score);
      out << '\n';
    }
  }

  static SubstitutionMatrix load(std::istream& in) {
    std::string raw;
    std::size_t lineno = 1;
    if (!std::getline(in, raw) || raw != "#subst-matrix v1")
      throw parse_error("missing `#subst-matrix v1` header", lineno);
    WordPairScores scores;
    while (std::getline(in, raw)) {
      ++lineno;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.empty() || raw[0] == '#') continue;
      auto fields = detail::split(raw, '\t');
      if (fields.size() != 3)
        throw parse_error("expected `word_a TAB word_b TAB score`", lineno);
      double value = 0.0;
      const char* begin = fields[2].data();
      const char* end = begin + fields[2].size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end)
        throw parse_error("bad score '" + fields[2] + "'", lineno);
      if (!(value >= 0.0 && value <= 1.0))
        throw parse_error("score " + fields[2] + " outside [0,1]", lineno);
      if (auto existing = scores.get(fields[0], fields[1]);
          existing && *existing != value)
        throw parse_error("conflicting duplicate for (" + fields[0] + ", " +
                              fields[1] + ")",
                          lineno);
      scores.set(fields[0], fields[1], value);
    }
    return build(std::move(scores));
  }

  // Self-pairs are implicitly 1 whether stored or not, so equality is
  // over the non-self entries only.
  friend bool operator==(const SubstitutionMatrix& a,
                         const SubstitutionMatrix& b) {
    auto ia = a.scores_.begin(), ib = b.scores_.begin();
    for (;;) {
      while (ia != a.scores_.end() && ia->first.first == ia->first.second)
        ++ia;
      while (ib != b.scores_.end() && ib->first.first == ib->first.second)
        ++ib;
      if (ia == a.scores_.end() || ib == b.scores_.end())
        return ia == a.scores_.end() && ib == b.scores_.end();
      if (*ia != *ib) return false;
      ++ia;
      ++ib;
    }
  }

 private:
  WordPairScores scores_;
};

}  // namespace lakern
