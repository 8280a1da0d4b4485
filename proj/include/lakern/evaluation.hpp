#pragma once

// Experimental protocol: k-fold cross-validation with nested C-grid
// selection, precision/recall/F metrics, paired t-tests, LA-parameter
// sweeps and learning curves.
//
// Cross-validation selects C per outer fold by an inner 3-fold split of
// the training portion (ties toward smaller C) so the held-out fold
// never leaks into model selection. Aggregates are micro-averaged
// counts. Fold members are processed in instance-id order, which makes
// results independent of the dataset's incoming order for a fixed fold
// assignment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lakern/gram.hpp"
#include "lakern/kernels.hpp"
#include "lakern/parallel.hpp"
#include "lakern/rng.hpp"
#include "lakern/stats.hpp"
#include "lakern/substitution.hpp"
#include "lakern/svm.hpp"
#include "lakern/token.hpp"

namespace lakern {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> assignment;  // instance -> fold

  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 0x100000001b3ULL;
    };
    mix(k);
    mix(seed);
    for (auto a : assignment) mix(a);
    return h;
  }
};

// Seeded uniform shuffle then contiguous chunking; fold sizes differ by
// at most one. The stratified variant deals each class round-robin.
inline FoldPlan kfold_split_indices(std::size_t n, std::size_t k,
                                    std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be >= 2");
  if (k > n)
    throw std::invalid_argument("fold count " + std::to_string(k) +
                                " exceeds dataset size " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  FoldPlan plan{k, seed, std::vector<std::uint32_t>(n)};
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t sz = base + (f < extra ? 1 : 0);
    for (std::size_t c = 0; c < sz; ++c)
      plan.assignment[order[pos++]] = static_cast<std::uint32_t>(f);
  }
  return plan;
}

inline FoldPlan kfold_split(const Dataset& ds, std::size_t k,
                            std::uint64_t seed, bool stratified = false) {
  if (!stratified) return kfold_split_indices(ds.size(), k, seed);
  if (k < 2) throw std::invalid_argument("fold count must be >= 2");
  if (k > ds.size())
    throw std::invalid_argument("fold count exceeds dataset size");
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (ds[i].label == Label::positive ? pos_idx : neg_idx).push_back(i);
  Rng rng(seed);
  shuffle(pos_idx, rng);
  shuffle(neg_idx, rng);
  FoldPlan plan{k, seed, std::vector<std::uint32_t>(ds.size())};
  std::size_t cursor = 0;
  for (const auto* cls : {&pos_idx, &neg_idx})
    for (std::size_t i : *cls)
      plan.assignment[i] = static_cast<std::uint32_t>(cursor++ % k);
  return plan;
}

struct Metrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const {
    return tp + fp == 0 ? 0.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fp);
  }
  double recall() const {
    return tp + fn == 0 ? 0.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fn);
  }
  double f_score() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  void add(const Metrics& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
  }
  void count(int actual, int predicted) {
    if (actual > 0)
      predicted > 0 ? ++tp : ++fn;
    else
      predicted > 0 ? ++fp : ++tn;
  }
};

inline Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp,
                                   std::uint64_t fn, std::uint64_t tn) {
  return Metrics{tp, fp, fn, tn};
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool significant = false;
};

inline TTestResult paired_ttest(const std::vector<double>& a,
                                const std::vector<double>& b,
                                double alpha = 0.05) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired t-test needs equal-length samples");
  if (a.size() < 2)
    throw std::invalid_argument("paired t-test needs at least 2 pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  TTestResult r;
  if (sd == 0.0) {
    if (mean == 0.0) return {0.0, 1.0, false};
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
  } else {
    r.t = mean / (sd / std::sqrt(n));
    r.p = student_t_two_tailed_p(r.t, n - 1.0);
  }
  r.significant = r.p <= alpha;
  return r;
}

inline std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 12; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

struct FoldOutcome {
  Metrics metrics;
  double chosen_c = 0.0;
  bool degenerate = false;  // single-class training portion
};

struct CvResult {
  std::vector<FoldOutcome> folds;
  Metrics aggregate;

  std::vector<double> fold_f_scores() const {
    std::vector<double> out;
    out.reserve(folds.size());
    for (const auto& f : folds) out.push_back(f.metrics.f_score());
    return out;
  }
};

namespace detail {

inline GramMatrix subgram(const GramMatrix& g,
                          const std::vector<std::size_t>& idx) {
  std::vector<std::string> ids;
  ids.reserve(idx.size());
  for (auto i : idx) ids.push_back(g.ids()[i]);
  GramMatrix out(std::move(ids), g.normalized());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b)
      out.set_symmetric(a, b, g.at(idx[a], idx[b]));
  return out;
}

inline int majority_sign(const std::vector<int>& labels,
                         const std::vector<std::size_t>& idx) {
  long long sum = 0;
  for (auto i : idx) sum += labels[i];
  return sum > 0 ? +1 : -1;
}

inline bool single_class(const std::vector<int>& labels,
                         const std::vector<std::size_t>& idx) {
  bool pos = false, neg = false;
  for (auto i : idx) (labels[i] > 0 ? pos : neg) = true;
  return !(pos && neg);
}

// Micro F over an inner split of `train` at penalty C; used for grid
// selection only.
inline double inner_cv_f(const GramMatrix& g, const std::vector<int>& labels,
                         const std::vector<std::size_t>& pool, double c,
                         const FoldPlan& inner_plan, const TrainConfig& base) {
  Metrics total;
  for (std::size_t f = 0; f < inner_plan.k; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t p = 0; p < pool.size(); ++p)
      (inner_plan.assignment[p] == f ? te : tr).push_back(pool[p]);
    if (te.empty()) continue;
    if (single_class(labels, tr)) {
      const int sign = majority_sign(labels, tr);
      for (auto i : te) total.count(labels[i], sign);
      continue;
    }
    TrainConfig cfg = base;
    cfg.C = c;
    cfg.seed = derive_seed(base.seed, 0x5e1ec7 + f);
    std::vector<int> tr_labels;
    tr_labels.reserve(tr.size());
    for (auto i : tr) tr_labels.push_back(labels[i]);
    const TrainedModel model = train(subgram(g, tr), tr_labels, cfg);
    std::vector<double> row(tr.size());
    for (auto i : te) {
      for (std::size_t j = 0; j < tr.size(); ++j) row[j] = g.at(i, tr[j]);
      total.count(labels[i], predict(model, row).label);
    }
  }
  return total.f_score();
}

inline double select_c(const GramMatrix& g, const std::vector<int>& labels,
                       const std::vector<std::size_t>& pool,
                       const std::vector<double>& c_grid,
                       std::uint64_t fold_seed, const TrainConfig& base) {
  if (c_grid.size() == 1) return c_grid.front();
  const std::size_t inner_k = std::min<std::size_t>(3, pool.size());
  if (inner_k < 2) return c_grid.front();
  const FoldPlan inner_plan =
      kfold_split_indices(pool.size(), inner_k, fold_seed);
  double best_c = c_grid.front();
  double best_f = -1.0;
  for (double c : c_grid) {
    TrainConfig cfg = base;
    cfg.seed = fold_seed;
    const double f = inner_cv_f(g, labels, pool, c, inner_plan, cfg);
    if (f > best_f || (f == best_f && c < best_c)) {
      best_f = f;
      best_c = c;
    }
  }
  return best_c;
}

}  // namespace detail

inline CvResult cross_validate(const GramMatrix& g,
                               const std::vector<int>& labels,
                               const FoldPlan& plan,
                               const std::vector<double>& c_grid,
                               const TrainConfig& base = {}) {
  if (labels.size() != g.size() || plan.assignment.size() != g.size())
    throw std::invalid_argument("gram, labels and fold plan sizes differ");
  if (c_grid.empty()) throw std::invalid_argument("empty C grid");

  CvResult result;
  result.folds.resize(plan.k);
  for (std::size_t f = 0; f < plan.k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < g.size(); ++i)
      (plan.assignment[i] == f ? test_idx : train_idx).push_back(i);
    // id order decouples the fold computation from dataset order
    auto by_id = [&](std::size_t a, std::size_t b) {
      return g.ids()[a] < g.ids()[b];
    };
    std::sort(train_idx.begin(), train_idx.end(), by_id);
    std::sort(test_idx.begin(), test_idx.end(), by_id);

    FoldOutcome& outcome = result.folds[f];
    if (detail::single_class(labels, train_idx)) {
      outcome.degenerate = true;
      const int sign = detail::majority_sign(labels, train_idx);
      for (auto i : test_idx) outcome.metrics.count(labels[i], sign);
      result.aggregate.add(outcome.metrics);
      continue;
    }

    const std::uint64_t fold_seed = derive_seed(plan.seed, 0xf01d + f);
    outcome.chosen_c =
        detail::select_c(g, labels, train_idx, c_grid, fold_seed, base);
    TrainConfig cfg = base;
    cfg.C = outcome.chosen_c;
    cfg.seed = fold_seed;
    std::vector<int> tr_labels;
    tr_labels.reserve(train_idx.size());
    for (auto i : train_idx) tr_labels.push_back(labels[i]);
    const TrainedModel model =
        train(detail::subgram(g, train_idx), tr_labels, cfg);
    std::vector<double> row(train_idx.size());
    for (auto i : test_idx) {
      for (std::size_t j = 0; j < train_idx.size(); ++j)
        row[j] = g.at(i, train_idx[j]);
      outcome.metrics.count(labels[i], predict(model, row).label);
    }
    result.aggregate.add(outcome.metrics);
  }
  return result;
}

struct SweepOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::vector<double> c_grid = default_c_grid();
  TrainConfig::Weighting weighting =
      TrainConfig::Weighting::inverse_class_probability;
  bool normalize = true;
  unsigned threads = 1;
};

struct SweepCell {
  double beta = 0.0;
  double gap_open = 0.0;
  double gap_extend = 0.0;
  std::string label;
  CvResult cv;
};

// Full beta x gap cross product, one cross-validation per cell, all
// cells sharing one fold plan.
inline std::vector<SweepCell> parameter_sweep(
    const Dataset& ds, const SubstitutionMatrix& subst,
    const std::vector<double>& beta_grid,
    const std::vector<std::pair<double, double>>& gap_grid,
    const SweepOptions& opt = {}) {
  if (beta_grid.empty() || gap_grid.empty())
    throw std::invalid_argument("empty sweep grid");
  const FoldPlan plan = kfold_split(ds, opt.folds, opt.seed);
  const std::vector<int> labels = ds.labels_pm1();

  std::vector<SweepCell> cells;
  for (double beta : beta_grid)
    for (const auto& [open, extend] : gap_grid) {
      SweepCell cell;
      cell.beta = beta;
      cell.gap_open = open;
      cell.gap_extend = extend;
      char buf[96];
      std::snprintf(buf, sizeof buf, "beta=%g gaps=%g/%g", beta, open,
                    extend);
      cell.label = buf;
      cells.push_back(std::move(cell));
    }

  detail::parallel_for(cells.size(), opt.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const AlignParams params{cell.beta, cell.gap_open, cell.gap_extend};
    GramMatrix g = compute_gram(ds, LaCell(ds, subst, params), 1);
    if (opt.normalize) g = normalize_gram(g);
    TrainConfig base;
    base.weighting = opt.weighting;
    cell.cv = cross_validate(g, labels, plan, opt.c_grid, base);
  });
  return cells;
}

struct CurvePoint {
  std::size_t size = 0;
  Metrics metrics;
  double chosen_c = 0.0;
  bool degenerate = false;
};

// Trains on seeded prefixes of the shuffled training block (the first
// `train_size` rows of the combined gram) and evaluates each model on
// the fixed test block. A model that predicts no positives still yields
// a row.
inline std::vector<CurvePoint> learning_curve(
    const GramMatrix& combined, const std::vector<int>& labels,
    std::size_t train_size, const std::vector<std::size_t>& sizes,
    std::uint64_t seed, const std::vector<double>& c_grid,
    const TrainConfig& base = {}) {
  if (labels.size() != combined.size())
    throw std::invalid_argument("gram and label sizes differ");
  if (train_size > combined.size())
    throw std::invalid_argument("training block exceeds gram size");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] < sizes[i - 1])
      throw std::invalid_argument("sizes must be ascending");
  if (!sizes.empty() && sizes.back() > train_size)
    throw std::invalid_argument("size exceeds training pool");

  std::vector<std::size_t> pool(train_size);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(derive_seed(seed, 0xc0ffee));
  shuffle(pool, rng);

  std::vector<std::size_t> test_idx(combined.size() - train_size);
  std::iota(test_idx.begin(), test_idx.end(), train_size);

  std::vector<CurvePoint> points;
  for (std::size_t size : sizes) {
    CurvePoint pt;
    pt.size = size;
    std::vector<std::size_t> train_idx(pool.begin(),
                                       pool.begin() + static_cast<long>(size));
    std::sort(train_idx.begin(), train_idx.end());
    if (detail::single_class(labels, train_idx)) {
      pt.degenerate = true;
      const int sign = detail::majority_sign(labels, train_idx);
      for (auto i : test_idx) pt.metrics.count(labels[i], sign);
      points.push_back(std::move(pt));
      continue;
    }
    const std::uint64_t size_seed = derive_seed(seed, 0xcafe + size);
    pt.chosen_c =
        detail::select_c(combined, labels, train_idx, c_grid, size_seed, base);
    TrainConfig cfg = base;
    cfg.C = pt.chosen_c;
    cfg.seed = size_seed;
    std::vector<int> tr_labels;
    for (auto i : train_idx) tr_labels.push_back(labels[i]);
    const TrainedModel model =
        train(detail::subgram(combined, train_idx), tr_labels, cfg);
    std::vector<double> row(train_idx.size());
    for (auto i : test_idx) {
      for (std::size_t j = 0; j < train_idx.size(); ++j)
        row[j] = combined.at(i, train_idx[j]);
      pt.metrics.count(labels[i], predict(model, row).label);
    }
    points.push_back(std::move(pt));
  }
  return points;
}

struct ReportRow {
  std::string cell;
  Metrics metrics;
};

inline void write_report(const std::vector<ReportRow>& rows,
                         std::ostream& out) {
  out << "cell\tprecision\trecall\tf_score\n";
  for (const auto& row : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f",
                  row.metrics.precision(), row.metrics.recall(),
                  row.metrics.f_score());
    out << row.cell << '\t' << buf << '\n';
  }
}

}  // namespace lakern
