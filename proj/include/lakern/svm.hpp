#pragma once

// Maximum-margin classifier on a precomputed kernel matrix, solved in
// the dual by sequential pairwise (SMO-style) optimization with an
// error cache. Per-instance box bounds C_i = C / prob(class(i)) realize
// inverse-class-probability weighting. Indefinite kernel matrices are
// accepted: when the pair subproblem loses positive curvature the
// update falls back to the better box endpoint, so the dual objective
// never decreases either way.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakern/gram.hpp"
#include "lakern/rng.hpp"
#include "lakern/token.hpp"

namespace lakern {

struct TrainConfig {
  enum class Weighting { none, inverse_class_probability };

  double C = 1.0;
  Weighting weighting = Weighting::none;
  double tolerance = 1e-6;
  std::size_t max_passes = 4000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(C > 0.0)) throw std::invalid_argument("C must be > 0");
    if (!(tolerance > 0.0))
      throw std::invalid_argument("tolerance must be > 0");
  }
};

struct TrainedModel {
  std::vector<double> alpha;  // dual coefficients, training order
  std::vector<int> labels;    // -1/+1, training order
  std::vector<double> box;    // per-instance upper bounds C_i
  double bias = 0.0;
  std::vector<std::string> support_ids;  // ids with alpha_i > 0
  bool converged = false;
  double kkt_residual = 0.0;
  std::size_t passes = 0;

  double decision(const std::vector<double>& kernel_row) const {
    if (kernel_row.size() != alpha.size())
      throw std::invalid_argument("kernel row length " +
                                  std::to_string(kernel_row.size()) +
                                  " does not match training size " +
                                  std::to_string(alpha.size()));
    double f = bias;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] != 0.0) f += alpha[i] * labels[i] * kernel_row[i];
    return f;
  }
};

// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const GramMatrix& g, const TrainedModel& m) {
  double obj = 0.0;
  for (std::size_t i = 0; i < m.alpha.size(); ++i) {
    if (m.alpha[i] == 0.0) continue;
    obj += m.alpha[i];
    for (std::size_t j = 0; j < m.alpha.size(); ++j)
      obj -= 0.5 * m.alpha[i] * m.alpha[j] * m.labels[i] * m.labels[j] *
             g.at(i, j);
  }
  return obj;
}

inline std::vector<double> class_boxes(const std::vector<int>& labels,
                                       const TrainConfig& cfg) {
  std::size_t pos = 0;
  for (int y : labels) pos += y > 0;
  const auto n = static_cast<double>(labels.size());
  std::vector<double> box(labels.size(), cfg.C);
  if (cfg.weighting == TrainConfig::Weighting::inverse_class_probability) {
    const double ppos = static_cast<double>(pos) / n;
    for (std::size_t i = 0; i < labels.size(); ++i)
      box[i] = cfg.C / (labels[i] > 0 ? ppos : 1.0 - ppos);
  }
  return box;
}

namespace detail {

class SmoSolver {
 public:
  SmoSolver(const GramMatrix& g, const std::vector<int>& labels,
            const TrainConfig& cfg)
      : g_(g),
        y_(labels),
        box_(class_boxes(labels, cfg)),
        tol_(cfg.tolerance),
        n_(labels.size()),
        alpha_(labels.size(), 0.0),
        err_(labels.size()) {
    for (std::size_t i = 0; i < n_; ++i)
      err_[i] = -static_cast<double>(y_[i]);  // f = 0 initially
  }

  TrainedModel solve(std::size_t max_passes, std::uint64_t seed,
                     const std::vector<std::string>& ids) {
    Rng rng(seed);
    std::vector<std::size_t> order(n_);
    for (std::size_t i = 0; i < n_; ++i) order[i] = i;

    bool examine_all = true;
    bool converged = false;
    std::size_t passes = 0;
    while (passes < max_passes) {
      ++passes;
      shuffle(order, rng);
      std::size_t changed = 0;
      for (std::size_t i : order) {
        if (!examine_all && (alpha_[i] <= 0.0 || alpha_[i] >= box_[i]))
          continue;
        changed += examine(i);
      }
      if (examine_all) {
        if (changed == 0) {
          converged = true;
          break;
        }
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }

    TrainedModel model;
    model.alpha = alpha_;
    model.labels = y_;
    model.box = box_;
    model.bias = bias_;
    model.converged = converged;
    model.kkt_residual = residual();
    model.passes = passes;
    for (std::size_t i = 0; i < n_; ++i)
      if (alpha_[i] > 0.0) model.support_ids.push_back(ids[i]);
    return model;
  }

  double residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double margin = y_[i] * err_[i];  // y_i f(x_i) - 1
      double v = 0.0;
      if (alpha_[i] <= 0.0)
        v = std::max(0.0, -margin);
      else if (alpha_[i] >= box_[i])
        v = std::max(0.0, margin);
      else
        v = std::abs(margin);
      worst = std::max(worst, v);
    }
    return worst;
  }

 private:
  static constexpr double kEps = 1e-12;

  bool violates(std::size_t i) const {
    const double margin = y_[i] * err_[i];
    return (margin < -tol_ && alpha_[i] < box_[i]) ||
           (margin > tol_ && alpha_[i] > 0.0);
  }

  std::size_t examine(std::size_t i2) {
    if (!violates(i2)) return 0;
    // Second-choice heuristic: the free point with the largest error
    // gap, then every free point, then everything (index order keeps
    // the solve deterministic).
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i2 || alpha_[j] <= 0.0 || alpha_[j] >= box_[j]) continue;
      const double gap = std::abs(err_[j] - err_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;
    for (std::size_t j = 0; j < n_; ++j)
      if (j != i2 && alpha_[j] > 0.0 && alpha_[j] < box_[j] &&
          take_step(j, i2))
        return 1;
    for (std::size_t j = 0; j < n_; ++j)
      if (j != i2 && take_step(j, i2)) return 1;
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const int y1 = y_[i1], y2 = y_[i2];
    const double s = y1 * y2;
    double lo, hi;
    if (s > 0) {
      lo = std::max(0.0, a1 + a2 - box_[i1]);
      hi = std::min(box_[i2], a1 + a2);
    } else {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(box_[i2], box_[i1] + a2 - a1);
    }
    if (hi - lo < kEps) return false;

    const double k11 = g_.at(i1, i1), k22 = g_.at(i2, i2),
                 k12 = g_.at(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > kEps) {
      a2_new = a2 + y2 * (err_[i1] - err_[i2]) / eta;
      a2_new = std::clamp(a2_new, lo, hi);
    } else {
      // Flat or concave along the pair segment: compare the dual
      // objective gain at both box endpoints.
      const double gain_lo = segment_gain(i1, i2, lo);
      const double gain_hi = segment_gain(i1, i2, hi);
      if (std::max(gain_lo, gain_hi) <= kEps) return false;
      a2_new = gain_lo >= gain_hi ? lo : hi;
    }
    if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
    const double a1_new = a1 + s * (a2 - a2_new);

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    double bias_new;
    const double b1 = bias_ - err_[i1] - d1 * k11 - d2 * k12;
    const double b2 = bias_ - err_[i2] - d1 * k12 - d2 * k22;
    if (a1_new > kEps && a1_new < box_[i1] - kEps)
      bias_new = b1;
    else if (a2_new > kEps && a2_new < box_[i2] - kEps)
      bias_new = b2;
    else
      bias_new = 0.5 * (b1 + b2);

    const double db = bias_new - bias_;
    for (std::size_t j = 0; j < n_; ++j)
      err_[j] += d1 * g_.at(i1, j) + d2 * g_.at(i2, j) + db;
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    bias_ = bias_new;
    return true;
  }

  // Dual objective change when alpha_[i2] moves to t along the equality
  // constraint (alpha_[i1] compensating).
  double segment_gain(std::size_t i1, std::size_t i2, double t) const {
    const double delta2 = t - alpha_[i2];
    const double s = y_[i1] * y_[i2];
    const double delta1 = -s * delta2;
    const double g1 = err_[i1] + y_[i1] - bias_;  // sum_k alpha_k y_k K_1k
    const double g2 = err_[i2] + y_[i2] - bias_;
    const double k11 = g_.at(i1, i1), k22 = g_.at(i2, i2),
                 k12 = g_.at(i1, i2);
    return delta1 + delta2 - y_[i1] * delta1 * g1 - y_[i2] * delta2 * g2 -
           0.5 * delta1 * delta1 * k11 - 0.5 * delta2 * delta2 * k22 -
           s * delta1 * delta2 * k12;
  }

  const GramMatrix& g_;
  const std::vector<int>& y_;
  std::vector<double> box_;
  double tol_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> err_;
  double bias_ = 0.0;
};

}  // namespace detail

inline TrainedModel train(const GramMatrix& g, const std::vector<int>& labels,
                          const TrainConfig& cfg) {
  cfg.validate();
  if (g.size() != labels.size())
    throw std::invalid_argument("label count " +
                                std::to_string(labels.size()) +
                                " does not match gram size " +
                                std::to_string(g.size()));
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == +1)
      has_pos = true;
    else if (y == -1)
      has_neg = true;
    else
      throw std::invalid_argument("labels must be -1 or +1");
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("training data contains a single class");

  detail::SmoSolver solver(g, labels, cfg);
  return solver.solve(cfg.max_passes, cfg.seed, g.ids());
}

struct Prediction {
  int label;  // -1/+1; a decision value of exactly 0 maps to -1
  double decision;
};

inline Prediction predict(const TrainedModel& model,
                          const std::vector<double>& kernel_row) {
  const double f = model.decision(kernel_row);
  return {f > 0.0 ? +1 : -1, f};
}

// LibSVM-style precomputed-kernel export: one line per instance,
// `<label> 0:<serial> 1:<k(i,1)> ... n:<k(i,n)>` with serials from 1.
inline void export_precomputed(const GramMatrix& g,
                               const std::vector<int>& labels,
                               std::ostream& out) {
  if (g.size() != labels.size())
    throw std::invalid_argument("label count does not match gram size");
  char buf[32];
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << (labels[i] > 0 ? "+1" : "-1") << " 0:" << (i + 1);
    for (std::size_t j = 0; j < g.size(); ++j) {
      out << ' ' << (j + 1) << ':';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, g.at(i, j),
                                     std::chars_format::general, 17);
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

// Model file: `#svm-model v1`, optional `#meta key value` lines, the
// bias, then one `id TAB alpha_i*y_i` line per support instance.
struct SavedModel {
  std::map<std::string, std::string> meta;
  double bias = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
};

inline void save_model(const TrainedModel& model,
                       const std::map<std::string, std::string>& meta,
                       const std::vector<std::string>& ids,
                       std::ostream& out) {
  out << "#svm-model v1\n";
  for (const auto& [k, v] : meta) out << "#meta " << k << ' ' << v << '\n';
  char buf[32];
  auto write_num = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::general, 17);
    out.write(buf, ptr - buf);
  };
  out << "bias ";
  write_num(model.bias);
  out << '\n';
  for (std::size_t i = 0; i < model.alpha.size(); ++i) {
    if (model.alpha[i] == 0.0) continue;
    out << ids[i] << '\t';
    write_num(model.alpha[i] * model.labels[i]);
    out << '\n';
  }
}

inline SavedModel load_model(std::istream& in) {
  SavedModel model;
  std::string raw;
  std::size_t lineno = 1;
  if (!std::getline(in, raw) || raw != "#svm-model v1")
    throw parse_error("missing `#svm-model v1` header", lineno);
  bool saw_bias = false;
  while (std::getline(in, raw)) {
    ++lineno;
    if (raw.empty()) continue;
    if (raw.starts_with("#meta ")) {
      const auto rest = raw.substr(6);
      const auto space = rest.find(' ');
      if (space == std::string::npos)
        throw parse_error("bad meta line", lineno);
      model.meta[rest.substr(0, space)] = rest.substr(space + 1);
      continue;
    }
    if (raw[0] == '#') continue;
    if (raw.starts_with("bias ")) {
      model.bias = std::stod(raw.substr(5));
      saw_bias = true;
      continue;
    }
    auto fields = detail::split(raw, '\t');
    if (fields.size() != 2)
      throw parse_error("expected `id TAB coefficient`", lineno);
    model.coefficients.emplace_back(fields[0], std::stod(fields[1]));
  }
  if (!saw_bias) throw parse_error("model file has no bias line", lineno);
  return model;
}

}  // namespace lakern
