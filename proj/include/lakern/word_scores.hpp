#pragma once

// Symmetric word-pair score table in [0,1]. Pairs are stored once under
// a canonical (min,max) key; iteration order is deterministic.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace lakern {

class WordPairScores {
 public:
  using Pair = std::pair<std::string, std::string>;

  static Pair canonical(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

  void set(const std::string& a, const std::string& b, double score) {
    if (!(score >= 0.0 && score <= 1.0))
      throw std::out_of_range("word-pair score " + std::to_string(score) +
                              " outside [0,1] for (" + a + ", " + b + ")");
    scores_[canonical(a, b)] = score;
  }

  std::optional<double> get(const std::string& a,
                            const std::string& b) const {
    auto it = scores_.find(canonical(a, b));
    if (it == scores_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return scores_.size(); }
  auto begin() const { return scores_.begin(); }
  auto end() const { return scores_.end(); }

  friend bool operator==(const WordPairScores&,
                         const WordPairScores&) = default;

 private:
  std::map<Pair, double> scores_;
};

}  // namespace lakern
