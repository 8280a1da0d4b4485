#pragma once

// Comparison kernels over dependency paths and the dataset-indexed
// substitution table that makes whole-Gram LA computation cheap.

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lakern/align.hpp"
#include "lakern/substitution.hpp"
#include "lakern/token.hpp"

namespace lakern {

// Product over positions of the number of shared features; zero when
// the paths differ in length. A token's feature set is its canonical
// spelling plus any extra feature fields.
inline double shortest_path_kernel(const PathSequence& x,
                                   const PathSequence& y) {
  if (x.size() != y.size()) return 0.0;
  double product = 1.0;
  std::set<std::string> fa, fb;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fa.clear();
    fb.clear();
    fa.insert(x[i].key());
    fa.insert(x[i].features.begin(), x[i].features.end());
    fb.insert(y[i].key());
    fb.insert(y[i].features.begin(), y[i].features.end());
    std::size_t shared = 0;
    for (const auto& f : fa)
      if (fb.contains(f)) ++shared;
    product *= static_cast<double>(shared);
    if (product == 0.0) return 0.0;
  }
  return product;
}

// Gap-weighted subsequence kernel of order n with decay lambda: inner
// product of feature maps indexed by token subsequences of length n,
// each weighted by lambda^(span). Standard O(n*|x|*|y|) recursion;
// tokens match on canonical spelling.
inline double gap_weighted_kernel(const PathSequence& x,
                                  const PathSequence& y, std::size_t n = 4,
                                  double lambda = 0.5) {
  if (n < 1) throw std::invalid_argument("subsequence length must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("decay must lie in (0,1]");
  const std::size_t sx = x.size(), sy = y.size();
  if (sx < n || sy < n) return 0.0;

  std::vector<std::vector<bool>> eq(sx, std::vector<bool>(sy));
  for (std::size_t i = 0; i < sx; ++i)
    for (std::size_t j = 0; j < sy; ++j)
      eq[i][j] = x[i].key() == y[j].key();

  // kp[i][j] = K'_l over prefixes x[0..i), y[0..j)
  std::vector<std::vector<double>> kp(sx + 1,
                                      std::vector<double>(sy + 1, 1.0));
  std::vector<std::vector<double>> kp_next(sx + 1,
                                           std::vector<double>(sy + 1));
  std::vector<double> kpp(sy + 1);

  for (std::size_t l = 1; l < n; ++l) {
    for (auto& row : kp_next) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = l; i < sx; ++i) {
      std::fill(kpp.begin(), kpp.end(), 0.0);
      for (std::size_t j = l; j < sy; ++j) {
        kpp[j] = lambda * kpp[j - 1] +
                 (eq[i - 1][j - 1] ? lambda * lambda * kp[i - 1][j - 1]
                                   : 0.0);
        kp_next[i][j] = lambda * kp_next[i - 1][j] + kpp[j];
      }
    }
    std::swap(kp, kp_next);
  }

  double result = 0.0;
  for (std::size_t i = n; i <= sx; ++i)
    for (std::size_t j = n; j <= sy; ++j)
      if (eq[i - 1][j - 1])
        result += lambda * lambda * kp[i - 1][j - 1];
  return result;
}

// Interns a dataset's tokens and materializes d'(.,.) over the interned
// ids, so Gram construction pays one array access per DP cell instead
// of hashing token strings. Falls back to a hash map when the dense
// table would be too large.
class IndexedSubstitution {
 public:
  IndexedSubstitution(const Dataset& ds, const SubstitutionMatrix& subst,
                      std::size_t dense_limit = 4096) {
    std::unordered_map<std::string, std::int32_t> index;
    std::vector<const Token*> rep;
    encoded_.reserve(ds.size());
    for (const auto& inst : ds) {
      std::vector<std::int32_t> codes;
      codes.reserve(inst.path.size());
      for (const auto& tok : inst.path) {
        auto [it, inserted] =
            index.emplace(tok.key(), static_cast<std::int32_t>(rep.size()));
        if (inserted) rep.push_back(&tok);
        codes.push_back(it->second);
      }
      encoded_.push_back(std::move(codes));
    }
    count_ = rep.size();
    if (count_ <= dense_limit) {
      dense_.assign(count_ * count_, 0.0);
      for (std::size_t i = 0; i < count_; ++i)
        for (std::size_t j = i; j < count_; ++j) {
          const double v = subst.lookup(*rep[i], *rep[j]);
          dense_[i * count_ + j] = v;
          dense_[j * count_ + i] = v;
        }
    } else {
      sparse_.reserve(count_ * 4);
      for (std::size_t i = 0; i < count_; ++i)
        for (std::size_t j = i; j < count_; ++j) {
          const double v = subst.lookup(*rep[i], *rep[j]);
          if (v != 0.0)
            sparse_.emplace(pack(static_cast<std::int32_t>(i),
                                 static_cast<std::int32_t>(j)),
                            v);
        }
    }
  }

  double score(std::int32_t a, std::int32_t b) const {
    if (!dense_.empty())
      return dense_[static_cast<std::size_t>(a) * count_ +
                    static_cast<std::size_t>(b)];
    auto it = sparse_.find(pack(std::min(a, b), std::max(a, b)));
    return it == sparse_.end() ? 0.0 : it->second;
  }

  const std::vector<std::int32_t>& path(std::size_t instance) const {
    return encoded_[instance];
  }

 private:
  static std::uint64_t pack(std::int32_t lo, std::int32_t hi) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(lo))
            << 32) |
           static_cast<std::uint32_t>(hi);
  }

  std::size_t count_ = 0;
  std::vector<double> dense_;
  std::unordered_map<std::uint64_t, double> sparse_;
  std::vector<std::vector<std::int32_t>> encoded_;
};

// Cell functors for compute_gram: callable on a pair of dataset indices.

class LaCell {
 public:
  LaCell(const Dataset& ds, const SubstitutionMatrix& subst,
         AlignParams params)
      : indexed_(std::make_shared<IndexedSubstitution>(ds, subst)),
        params_(params) {
    params_.validate();
  }

  double operator()(std::size_t i, std::size_t j) const {
    const auto& subst = *indexed_;
    return la_kernel(subst.path(i), subst.path(j),
                     [&subst](std::int32_t a, std::int32_t b) {
                       return subst.score(a, b);
                     },
                     params_);
  }

 private:
  std::shared_ptr<const IndexedSubstitution> indexed_;
  AlignParams params_;
};

class ShortestPathCell {
 public:
  explicit ShortestPathCell(const Dataset& ds) : ds_(&ds) {}
  double operator()(std::size_t i, std::size_t j) const {
    return shortest_path_kernel((*ds_)[i].path, (*ds_)[j].path);
  }

 private:
  const Dataset* ds_;
};

class GapWeightedCell {
 public:
  GapWeightedCell(const Dataset& ds, std::size_t n, double lambda)
      : ds_(&ds), n_(n), lambda_(lambda) {}
  double operator()(std::size_t i, std::size_t j) const {
    return gap_weighted_kernel((*ds_)[i].path, (*ds_)[j].path, n_, lambda_);
  }

 private:
  const Dataset* ds_;
  std::size_t n_;
  double lambda_;
};

}  // namespace lakern
