#pragma once

// Dense symmetric kernel matrix over a dataset. The upper triangle is
// distributed across worker threads and mirrored, so results are
// bit-identical for any worker count. Normalization implements
// k'(x,y) = k(x,y)/sqrt(k(x,x)k(y,y)).
//
// File format: `#gram v1 normalized={0|1}`, the instance count, one
// instance id per line, then one lower-triangle row per line with
// 17-significant-digit values.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lakern/token.hpp"

namespace lakern {

class GramMatrix {
 public:
  GramMatrix() = default;
  GramMatrix(std::vector<std::string> ids, bool normalized = false)
      : n_(ids.size()),
        ids_(std::move(ids)),
        normalized_(normalized),
        values_(n_ * n_, 0.0) {}

  std::size_t size() const { return n_; }
  bool normalized() const { return normalized_; }
  const std::vector<std::string>& ids() const { return ids_; }

  double at(std::size_t i, std::size_t j) const {
    return values_[i * n_ + j];
  }
  void set_symmetric(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  void save(std::ostream& out) const {
    out << "#gram v1 normalized=" << (normalized_ ? 1 : 0) << '\n';
    out << n_ << '\n';
    for (const auto& id : ids_) out << id << '\n';
    char buf[32];
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        if (j) out << ' ';
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, at(i, j),
                                       std::chars_format::general, 17);
        out.write(buf, ptr - buf);
      }
      out << '\n';
    }
  }

  static GramMatrix load(std::istream& in) {
    std::string raw;
    std::size_t lineno = 1;
    if (!std::getline(in, raw)) throw parse_error("empty gram file", lineno);
    bool normalized = false;
    if (raw == "#gram v1 normalized=1")
      normalized = true;
    else if (raw != "#gram v1 normalized=0")
      throw parse_error("missing `#gram v1` header", lineno);
    ++lineno;
    if (!std::getline(in, raw))
      throw parse_error("missing instance count", lineno);
    std::size_t n = 0;
    try {
      n = static_cast<std::size_t>(std::stoull(raw));
    } catch (const std::exception&) {
      throw parse_error("bad instance count '" + raw + "'", lineno);
    }
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      ++lineno;
      if (!std::getline(in, raw))
        throw parse_error("missing instance id", lineno);
      ids.push_back(raw);
    }
    GramMatrix g(std::move(ids), normalized);
    for (std::size_t i = 0; i < n; ++i) {
      ++lineno;
      if (!std::getline(in, raw))
        throw parse_error("missing matrix row", lineno);
      const char* p = raw.data();
      const char* end = p + raw.size();
      for (std::size_t j = 0; j <= i; ++j) {
        while (p != end && *p == ' ') ++p;
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc())
          throw parse_error("bad matrix value in row " + std::to_string(i),
                            lineno);
        p = next;
        g.set_symmetric(i, j, v);
      }
    }
    return g;
  }

  friend bool operator==(const GramMatrix&, const GramMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::string> ids_;
  bool normalized_ = false;
  std::vector<double> values_;
};

// Fills the upper triangle in parallel (threads = 0 picks the hardware
// count). Each cell is computed exactly once by one worker, so the
// result does not depend on scheduling.
inline GramMatrix compute_gram(
    const Dataset& ds, const std::function<double(std::size_t, std::size_t)>& cell,
    unsigned threads = 1) {
  GramMatrix g(ds.ids());
  const std::size_t n = g.size();
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  auto worker = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += threads)
      for (std::size_t j = i; j < n; ++j) g.set_symmetric(i, j, cell(i, j));
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  return g;
}

inline GramMatrix normalize_gram(const GramMatrix& g) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(g.at(i, i) > 0.0))
      throw std::domain_error("cannot normalize: instance '" + g.ids()[i] +
                              "' has non-positive self-kernel " +
                              std::to_string(g.at(i, i)));
  GramMatrix out(g.ids(), true);
  for (std::size_t i = 0; i < n; ++i) {
    out.set_symmetric(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j)
      out.set_symmetric(i, j,
                        g.at(i, j) / std::sqrt(g.at(i, i) * g.at(j, j)));
  }
  return out;
}

// Normalizes one kernel row of a new instance against training
// self-kernels, matching what normalize_gram does to training cells.
inline std::vector<double> normalize_row(const std::vector<double>& row,
                                         double self,
                                         const std::vector<double>& train_diag) {
  if (row.size() != train_diag.size())
    throw std::invalid_argument("kernel row length mismatch");
  if (!(self > 0.0))
    throw std::domain_error("non-positive self-kernel for test instance");
  std::vector<double> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!(train_diag[i] > 0.0))
      throw std::domain_error("non-positive training self-kernel");
    out[i] = row[i] / std::sqrt(self * train_diag[i]);
  }
  return out;
}

}  // namespace lakern
