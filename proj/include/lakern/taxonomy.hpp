#pragma once

// Rooted concept taxonomy with occurrence counts and the five
// relatedness measures defined over it (path-based wup/lch and the
// information-content measures res/jcn/lin).
//
// Conventions: dep(root) = 1 (node counting), path lengths in edges,
// natural logarithms, p(c) = propagated(c)/propagated(root) where
// propagated covers the concept and all descendants. len(c,c) is
// substituted by 1 before the lch formula so the value stays finite.
//
// File format (TSV): `concept_id TAB parent_id_or_- TAB direct_count`,
// exactly one root line with parent `-`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lakern/token.hpp"  // parse_error, detail::split

namespace lakern {

enum class TaxonomyMeasure { wup, lch, res, jcn, lin };

inline TaxonomyMeasure parse_taxonomy_measure(const std::string& name) {
  if (name == "wup") return TaxonomyMeasure::wup;
  if (name == "lch") return TaxonomyMeasure::lch;
  if (name == "res") return TaxonomyMeasure::res;
  if (name == "jcn") return TaxonomyMeasure::jcn;
  if (name == "lin") return TaxonomyMeasure::lin;
  throw std::invalid_argument("unknown taxonomy measure '" + name + "'");
}

class Taxonomy {
 public:
  struct ConceptSpec {
    std::string id;
    std::string parent;  // empty = root
    std::uint64_t count = 0;
  };

  explicit Taxonomy(const std::vector<ConceptSpec>& concepts) {
    if (concepts.empty()) throw std::invalid_argument("empty taxonomy");
    nodes_.reserve(concepts.size());
    for (const auto& c : concepts) {
      if (c.id.empty()) throw std::invalid_argument("empty concept id");
      if (!index_.emplace(c.id, static_cast<int>(nodes_.size())).second)
        throw std::invalid_argument("duplicate concept id '" + c.id + "'");
      nodes_.push_back(Node{c.id, -1, c.count, c.count, 0});
    }
    int root = -1;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
      if (concepts[i].parent.empty()) {
        if (root >= 0)
          throw std::invalid_argument("multiple roots: '" +
                                      nodes_[root].id + "' and '" +
                                      concepts[i].id + "'");
        root = static_cast<int>(i);
        continue;
      }
      auto it = index_.find(concepts[i].parent);
      if (it == index_.end())
        throw std::invalid_argument("unknown parent '" + concepts[i].parent +
                                    "' of concept '" + concepts[i].id + "'");
      nodes_[i].parent = it->second;
    }
    if (root < 0) throw std::invalid_argument("taxonomy has no root");
    root_ = root;

    // Depths (root = 1); a node whose parent chain never reaches the
    // root sits on a cycle.
    for (auto& n : nodes_) n.depth = 0;
    nodes_[root_].depth = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].depth > 0) continue;
      std::vector<int> chain;
      int cur = static_cast<int>(i);
      while (cur >= 0 && nodes_[cur].depth == 0) {
        chain.push_back(cur);
        if (chain.size() > nodes_.size())
          throw std::invalid_argument("cycle through concept '" +
                                      nodes_[i].id + "'");
        cur = nodes_[cur].parent;
      }
      if (cur < 0)
        throw std::invalid_argument("cycle through concept '" +
                                    nodes_[i].id + "'");
      int depth = nodes_[cur].depth;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        nodes_[*it].depth = ++depth;
    }
    max_depth_ = 0;
    for (const auto& n : nodes_) max_depth_ = std::max(max_depth_, n.depth);

    // Propagate counts upward, deepest nodes first.
    std::vector<int> order(nodes_.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
      return nodes_[a].depth > nodes_[b].depth;
    });
    for (int i : order)
      if (nodes_[i].parent >= 0)
        nodes_[nodes_[i].parent].propagated += nodes_[i].propagated;
  }

  static Taxonomy load(std::istream& in) {
    std::vector<ConceptSpec> concepts;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.empty() || raw[0] == '#') continue;
      auto fields = detail::split(raw, '\t');
      if (fields.size() != 3)
        throw parse_error("expected `concept TAB parent TAB count`", lineno);
      ConceptSpec spec;
      spec.id = fields[0];
      spec.parent = fields[1] == "-" ? std::string() : fields[1];
      try {
        const long long n = std::stoll(fields[2]);
        if (n < 0) throw std::out_of_range("negative");
        spec.count = static_cast<std::uint64_t>(n);
      } catch (const std::exception&) {
        throw parse_error("bad count '" + fields[2] + "'", lineno);
      }
      concepts.push_back(std::move(spec));
    }
    try {
      return Taxonomy(concepts);
    } catch (const std::invalid_argument& e) {
      throw parse_error(e.what(), lineno);
    }
  }

  std::size_t size() const { return nodes_.size(); }
  bool has(const std::string& id) const { return index_.contains(id); }
  const std::string& root() const { return nodes_[root_].id; }
  int max_depth() const { return max_depth_; }

  int depth(const std::string& id) const { return nodes_[find(id)].depth; }

  std::uint64_t propagated_count(const std::string& id) const {
    return nodes_[find(id)].propagated;
  }

  double probability(const std::string& id) const {
    const std::uint64_t total = nodes_[root_].propagated;
    if (total == 0)
      throw std::domain_error("taxonomy has no occurrence counts");
    return static_cast<double>(nodes_[find(id)].propagated) /
           static_cast<double>(total);
  }

  // Deepest common ancestor, both arguments inclusive.
  std::string lcs(const std::string& a, const std::string& b) const {
    int x = find(a), y = find(b);
    while (nodes_[x].depth > nodes_[y].depth) x = nodes_[x].parent;
    while (nodes_[y].depth > nodes_[x].depth) y = nodes_[y].parent;
    while (x != y) {
      x = nodes_[x].parent;
      y = nodes_[y].parent;
    }
    return nodes_[x].id;
  }

  // Shortest path length in edges (via the lcs; the taxonomy is a tree).
  int path_length(const std::string& a, const std::string& b) const {
    const int da = depth(a), db = depth(b);
    const int dl = depth(lcs(a, b));
    return (da - dl) + (db - dl);
  }

  double similarity(TaxonomyMeasure measure, const std::string& a,
                    const std::string& b) const {
    switch (measure) {
      case TaxonomyMeasure::wup: {
        const int dl = depth(lcs(a, b));
        const int la = depth(a) - dl;
        const int lb = depth(b) - dl;
        return 2.0 * dl / static_cast<double>(la + lb + 2 * dl);
      }
      case TaxonomyMeasure::lch: {
        int len = path_length(a, b);
        if (len == 0) len = 1;  // identical concepts, keep lch finite
        return -std::log(static_cast<double>(len) / (2.0 * max_depth_));
      }
      case TaxonomyMeasure::res:
        return -log_probability(lcs(a, b));
      case TaxonomyMeasure::jcn:
        // As printed this is the Jiang-Conrath distance (0 for identical
        // concepts, larger = less related); normalize_measure flips it.
        return 2.0 * log_probability(lcs(a, b)) -
               (log_probability(a) + log_probability(b));
      case TaxonomyMeasure::lin: {
        const double denom = log_probability(a) + log_probability(b);
        if (denom == 0.0) return 1.0;  // both probability 1
        return 2.0 * log_probability(lcs(a, b)) / denom;
      }
    }
    throw std::logic_error("unreachable");
  }

 private:
  struct Node {
    std::string id;
    int parent;
    std::uint64_t direct;
    std::uint64_t propagated;
    int depth;
  };

  int find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw std::invalid_argument("unknown concept '" + id + "'");
    return it->second;
  }

  double log_probability(const std::string& id) const {
    const double p = probability(id);
    if (p <= 0.0)
      throw std::domain_error("concept '" + id +
                              "' has zero probability; information-content "
                              "measures need positive counts");
    return std::log(p);
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
  int root_ = -1;
  int max_depth_ = 0;
};

struct ConceptPairScore {
  std::string c1, c2;
  double value = 0.0;
};

// Squashes raw measure values into [0,1] for substitution use. wup is
// already in range and passes through; lch/res/lin divide by the
// population maximum; jcn is distance-like and maps to 1 − v/max.
// Identical-concept pairs always map to 1.
inline std::vector<ConceptPairScore> normalize_measure(
    TaxonomyMeasure measure, std::vector<ConceptPairScore> population) {
  if (population.empty())
    throw std::invalid_argument("empty normalization population");
  if (measure == TaxonomyMeasure::wup) return population;
  double max = 0.0;
  for (const auto& p : population) max = std::max(max, p.value);
  for (auto& p : population) {
    if (p.c1 == p.c2 || max == 0.0) {
      p.value = 1.0;
    } else if (measure == TaxonomyMeasure::jcn) {
      p.value = 1.0 - p.value / max;
    } else {
      p.value = p.value / max;
    }
  }
  return population;
}

}  // namespace lakern
