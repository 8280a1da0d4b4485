#pragma once

// Distributional similarity from windowed co-occurrence counts: Dice,
// cosine and Euclidean (L2) over conditional context probabilities,
// plus the rescaling that turns the L2 distance into a [0,1] score.
//
// Context probabilities are unsmoothed relative frequencies. Windows
// never cross line boundaries and every occurrence counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakern/word_scores.hpp"

namespace lakern {

struct WindowSpec {
  std::size_t radius = 2;
};

class ContextCounts {
 public:
  using CountMap = std::map<std::string, std::uint64_t>;

  void add(const std::string& word, const std::string& context) {
    ++words_[word].counts[context];
    ++words_[word].total;
  }

  bool contains(const std::string& word) const {
    auto it = words_.find(word);
    return it != words_.end() && it->second.total > 0;
  }

  const CountMap& contexts(const std::string& word) const {
    static const CountMap kEmpty;
    auto it = words_.find(word);
    return it == words_.end() ? kEmpty : it->second.counts;
  }

  std::uint64_t total(const std::string& word) const {
    auto it = words_.find(word);
    return it == words_.end() ? 0 : it->second.total;
  }

  // P(c|word); zero for unstored contexts.
  double probability(const std::string& word, const std::string& ctx) const {
    auto it = words_.find(word);
    if (it == words_.end() || it->second.total == 0) return 0.0;
    auto jt = it->second.counts.find(ctx);
    if (jt == it->second.counts.end()) return 0.0;
    return static_cast<double>(jt->second) /
           static_cast<double>(it->second.total);
  }

  // Pointwise sum, for sharded counting.
  void merge(const ContextCounts& other) {
    for (const auto& [word, entry] : other.words_) {
      auto& mine = words_[word];
      mine.total += entry.total;
      for (const auto& [ctx, n] : entry.counts) mine.counts[ctx] += n;
    }
  }

 private:
  struct Entry {
    CountMap counts;
    std::uint64_t total = 0;
  };
  std::map<std::string, Entry> words_;
};

// Counts every token within +/- window.radius positions of each target
// occurrence (the occurrence itself excluded, clipped at line ends).
inline ContextCounts count_contexts(std::istream& corpus,
                                    const std::set<std::string>& targets,
                                    WindowSpec window = {}) {
  if (window.radius < 1)
    throw std::invalid_argument("window radius must be >= 1");
  ContextCounts counts;
  std::string line;
  std::vector<std::string> toks;
  while (std::getline(corpus, line)) {
    toks.clear();
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back(t);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!targets.contains(toks[i])) continue;
      const std::size_t lo = i >= window.radius ? i - window.radius : 0;
      const std::size_t hi =
          std::min(toks.size(), i + window.radius + 1);
      for (std::size_t j = lo; j < hi; ++j)
        if (j != i) counts.add(toks[i], toks[j]);
    }
  }
  return counts;
}

enum class DistributionalMeasure { dice, cosine, l2_raw };

inline DistributionalMeasure parse_distributional_measure(
    const std::string& name) {
  if (name == "dice") return DistributionalMeasure::dice;
  if (name == "cosine") return DistributionalMeasure::cosine;
  if (name == "l2") return DistributionalMeasure::l2_raw;
  throw std::invalid_argument("unknown distributional measure '" + name +
                              "'");
}

// dice   = 2|F(x) ∩ F(y)| / (|F(x)| + |F(y)|)
// cosine = Σ P(c|x)P(c|y) / sqrt(Σ P(c|x)² Σ P(c|y)²)
// l2_raw = sqrt(Σ (P(c|x) − P(c|y))²), in [0, sqrt(2)]
inline double distributional_similarity(DistributionalMeasure measure,
                                        const std::string& x,
                                        const std::string& y,
                                        const ContextCounts& counts) {
  if (!counts.contains(x))
    throw std::invalid_argument("word '" + x + "' has no context counts");
  if (!counts.contains(y))
    throw std::invalid_argument("word '" + y + "' has no context counts");
  const auto& fx = counts.contexts(x);
  const auto& fy = counts.contexts(y);
  switch (measure) {
    case DistributionalMeasure::dice: {
      std::size_t shared = 0;
      for (const auto& [c, n] : fx)
        if (fy.contains(c)) ++shared;
      return 2.0 * static_cast<double>(shared) /
             static_cast<double>(fx.size() + fy.size());
    }
    case DistributionalMeasure::cosine: {
      double dot = 0.0, nx = 0.0, ny = 0.0;
      for (const auto& [c, n] : fx) {
        const double px = counts.probability(x, c);
        nx += px * px;
        dot += px * counts.probability(y, c);
      }
      for (const auto& [c, n] : fy) {
        const double py = counts.probability(y, c);
        ny += py * py;
      }
      return dot / std::sqrt(nx * ny);
    }
    case DistributionalMeasure::l2_raw: {
      double sum = 0.0;
      for (const auto& [c, n] : fx) {
        const double d = counts.probability(x, c) - counts.probability(y, c);
        sum += d * d;
      }
      for (const auto& [c, n] : fy) {
        if (fx.contains(c)) continue;
        const double d = counts.probability(y, c);
        sum += d * d;
      }
      return std::sqrt(sum);
    }
  }
  throw std::logic_error("unreachable");
}

struct ScoredWordPair {
  std::string a, b;
  double value = 0.0;
};

// Maps raw L2 distances to [0,1] similarities: within each group,
// score' = 1 − v / max(group); identical-word pairs map to 1; an
// all-zero group maps to all 1 (every pair is distributionally equal).
inline std::vector<std::vector<ScoredWordPair>> l2_rescale(
    const std::vector<std::vector<ScoredWordPair>>& groups) {
  std::vector<std::vector<ScoredWordPair>> out;
  out.reserve(groups.size());
  for (const auto& group : groups) {
    if (group.empty())
      throw std::invalid_argument("empty l2_rescale group");
    double max = 0.0;
    for (const auto& p : group) max = std::max(max, p.value);
    std::vector<ScoredWordPair> rescored = group;
    for (auto& p : rescored)
      p.value = (p.a == p.b || max == 0.0) ? 1.0 : 1.0 - p.value / max;
    out.push_back(std::move(rescored));
  }
  return out;
}

// Full symmetric table over the vocabulary: k(k+1)/2 entries. Words
// without corpus contexts follow the out-of-vocabulary rule d(u,u)=1,
// d(u,.)=0. L2 entries are rescaled against the population of seen-seen
// pairs as one group, keeping the table exactly symmetric.
inline WordPairScores build_word_scores(const ContextCounts& counts,
                                        const std::vector<std::string>& vocab,
                                        DistributionalMeasure measure) {
  std::vector<std::string> words = vocab;
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  WordPairScores table;
  std::vector<ScoredWordPair> l2_pairs;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i; j < words.size(); ++j) {
      const auto& a = words[i];
      const auto& b = words[j];
      if (!counts.contains(a) || !counts.contains(b)) {
        table.set(a, b, a == b ? 1.0 : 0.0);
        continue;
      }
      if (measure == DistributionalMeasure::l2_raw) {
        l2_pairs.push_back(
            {a, b, distributional_similarity(measure, a, b, counts)});
      } else {
        table.set(a, b,
                  a == b ? 1.0
                         : distributional_similarity(measure, a, b, counts));
      }
    }
  }
  if (!l2_pairs.empty()) {
    auto rescored = l2_rescale({l2_pairs});
    for (const auto& p : rescored.front()) table.set(p.a, p.b, p.value);
  }
  return table;
}

}  // namespace lakern
