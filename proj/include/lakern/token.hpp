#pragma once

// Dependency-path sequence model: tokens, paths, labeled instances and
// the line-oriented instance file format.
//
// Token text encoding, one whitespace-free field per token:
//   <name        edge traversed upward (toward the governor)
//   >name        edge traversed downward
//   word         plain word token
//   word%c42     word annotated with taxonomy concept c42
// An optional feature list may be appended with '|' separators
// (word|NN|Noun); features are only consulted by the shortest-path
// kernel. '%' in words and '|' anywhere are reserved by the encoding.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace lakern {

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TokenKind { word, edge };
enum class EdgeDirection { up, down };

struct Token {
  TokenKind kind = TokenKind::word;
  std::string surface;                 // non-empty, free of tab/newline
  EdgeDirection direction = EdgeDirection::up;  // edges only
  std::string annotation;              // words only, empty = none
  std::vector<std::string> features;   // extra shortest-path features

  static Token word(std::string surface, std::string annotation = {},
                    std::vector<std::string> features = {}) {
    Token t;
    t.kind = TokenKind::word;
    t.surface = std::move(surface);
    t.annotation = std::move(annotation);
    t.features = std::move(features);
    return t;
  }

  static Token edge(EdgeDirection dir, std::string name,
                    std::vector<std::string> features = {}) {
    Token t;
    t.kind = TokenKind::edge;
    t.direction = dir;
    t.surface = std::move(name);
    t.features = std::move(features);
    return t;
  }

  bool is_word() const { return kind == TokenKind::word; }
  bool is_edge() const { return kind == TokenKind::edge; }

  // Canonical spelling without features; the identity used by
  // substitution lookup and kernel-level token matching.
  std::string key() const {
    if (is_edge())
      return (direction == EdgeDirection::up ? "<" : ">") + surface;
    if (!annotation.empty()) return surface + "%" + annotation;
    return surface;
  }

  std::string encode() const {
    std::string out = key();
    for (const auto& f : features) {
      out += '|';
      out += f;
    }
    return out;
  }

  friend bool operator==(const Token&, const Token&) = default;
};

using PathSequence = std::vector<Token>;

enum class Label { negative, positive };

inline int to_pm1(Label l) { return l == Label::positive ? +1 : -1; }

struct LabeledInstance {
  std::string id;
  Label label = Label::negative;
  PathSequence path;

  friend bool operator==(const LabeledInstance&,
                         const LabeledInstance&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledInstance> instances)
      : instances_(std::move(instances)) {}

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  const LabeledInstance& operator[](std::size_t i) const {
    return instances_[i];
  }
  auto begin() const { return instances_.begin(); }
  auto end() const { return instances_.end(); }

  std::size_t positive_count() const {
    std::size_t n = 0;
    for (const auto& inst : instances_)
      if (inst.label == Label::positive) ++n;
    return n;
  }
  std::size_t negative_count() const { return size() - positive_count(); }

  std::vector<int> labels_pm1() const {
    std::vector<int> out;
    out.reserve(size());
    for (const auto& inst : instances_) out.push_back(to_pm1(inst.label));
    return out;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(size());
    for (const auto& inst : instances_) out.push_back(inst.id);
    return out;
  }

  // Distinct word keys across all paths, sorted: the k-word vocabulary
  // a substitution matrix is built over.
  std::vector<std::string> word_vocabulary() const {
    std::unordered_set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& inst : instances_)
      for (const auto& tok : inst.path)
        if (tok.is_word() && seen.insert(tok.key()).second)
          out.push_back(tok.key());
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledInstance> instances_;
};

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline void check_surface(const std::string& s, std::size_t line) {
  if (s.empty()) throw parse_error("empty token surface", line);
  if (s.find('\t') != std::string::npos ||
      s.find('\n') != std::string::npos)
    throw parse_error("token surface contains tab or newline", line);
}

}  // namespace detail

inline Token parse_token(std::string_view text, std::size_t line = 0) {
  auto fields = detail::split(text, '|');
  std::string core = fields.front();
  std::vector<std::string> features(fields.begin() + 1, fields.end());
  for (const auto& f : features)
    if (f.empty()) throw parse_error("empty feature field in token", line);
  if (core.empty()) throw parse_error("empty token", line);
  if (core[0] == '<' || core[0] == '>') {
    const auto dir =
        core[0] == '<' ? EdgeDirection::up : EdgeDirection::down;
    std::string name = core.substr(1);
    detail::check_surface(name, line);
    return Token::edge(dir, std::move(name), std::move(features));
  }
  std::string annotation;
  if (auto pos = core.find('%'); pos != std::string::npos) {
    annotation = core.substr(pos + 1);
    if (annotation.empty())
      throw parse_error("empty annotation after '%'", line);
    core.resize(pos);
  }
  detail::check_surface(core, line);
  return Token::word(std::move(core), std::move(annotation),
                     std::move(features));
}

// Instance file: `id <TAB> label <TAB> token token ...`, label in {0,1},
// '#' lines are comments, an empty token field is an empty path.
inline Dataset parse_instances(std::istream& in) {
  std::vector<LabeledInstance> out;
  std::unordered_set<std::string> ids;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '#') continue;
    auto fields = detail::split(raw, '\t');
    if (fields.size() < 2 || fields.size() > 3)
      throw parse_error("expected `id TAB label TAB tokens`", lineno);
    LabeledInstance inst;
    inst.id = fields[0];
    if (inst.id.empty()) throw parse_error("empty instance id", lineno);
    if (fields[1] == "1")
      inst.label = Label::positive;
    else if (fields[1] == "0")
      inst.label = Label::negative;
    else
      throw parse_error("unknown label '" + fields[1] + "'", lineno);
    if (!ids.insert(inst.id).second)
      throw parse_error("duplicate id '" + inst.id + "'", lineno);
    if (fields.size() == 3 && !fields[2].empty()) {
      for (const auto& t : detail::split(fields[2], ' '))
        if (!t.empty()) inst.path.push_back(parse_token(t, lineno));
    }
    out.push_back(std::move(inst));
  }
  return Dataset(std::move(out));
}

inline void serialize_instances(const Dataset& ds, std::ostream& out) {
  for (const auto& inst : ds) {
    out << inst.id << '\t'
        << (inst.label == Label::positive ? '1' : '0') << '\t';
    for (std::size_t i = 0; i < inst.path.size(); ++i) {
      if (i) out << ' ';
      out << inst.path[i].encode();
    }
    out << '\n';
  }
}

// Replaces the surfaces of addressed word tokens with `label_text`
// (relation-argument labeling, aka PROTEIN substitution); annotations
// of replaced tokens are dropped. `positions` is aligned with dataset
// order and may be empty.
inline Dataset relabel_arguments(
    const Dataset& ds, const std::vector<std::vector<std::size_t>>& positions,
    const std::string& label_text) {
  if (!positions.empty() && positions.size() != ds.size())
    throw std::invalid_argument(
        "positions must be empty or match the dataset size");
  std::vector<LabeledInstance> out(ds.begin(), ds.end());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t pos : positions[i]) {
      if (pos >= out[i].path.size())
        throw std::out_of_range("token index " + std::to_string(pos) +
                                " out of range in instance '" + out[i].id +
                                "'");
      Token& tok = out[i].path[pos];
      if (tok.is_edge())
        throw std::invalid_argument("token index " + std::to_string(pos) +
                                    " addresses an edge token in instance '" +
                                    out[i].id + "'");
      tok.surface = label_text;
      tok.annotation.clear();
    }
  }
  return Dataset(std::move(out));
}

}  // namespace lakern
