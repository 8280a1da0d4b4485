#pragma once

// Shared fixtures and generators for the test suites.

#include <sstream>
#include <string>
#include <vector>

#include "lakern/evaluation.hpp"
#include "lakern/rng.hpp"
#include "lakern/substitution.hpp"
#include "lakern/token.hpp"

namespace lakern::testing {

// "a b >nsubj c%syn" -> path of parsed tokens
inline PathSequence path_of(const std::string& spec) {
  PathSequence path;
  std::istringstream in(spec);
  std::string tok;
  while (in >> tok) path.push_back(parse_token(tok));
  return path;
}

inline Dataset dataset_of(
    const std::vector<std::pair<std::string, int>>& rows) {
  std::vector<LabeledInstance> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.push_back({"i" + std::to_string(i),
                   rows[i].second ? Label::positive : Label::negative,
                   path_of(rows[i].first)});
  return Dataset(std::move(out));
}

// Random word path over alphabet {w0..w<alphabet-1>}.
inline PathSequence random_path(Rng& rng, std::size_t max_len,
                                std::size_t alphabet) {
  const std::size_t len = uniform_below(rng, max_len + 1);
  PathSequence path;
  for (std::size_t i = 0; i < len; ++i)
    path.push_back(Token::word(
        "w" + std::to_string(uniform_below(rng, alphabet))));
  return path;
}

inline std::vector<std::string> alphabet_vocab(std::size_t alphabet) {
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < alphabet; ++i)
    vocab.push_back("w" + std::to_string(i));
  return vocab;
}

// Linearly separable precomputed kernel: two Gaussian blobs around
// +mu/-mu embedded in R^4, K = X X^T (PSD).
inline std::pair<GramMatrix, std::vector<int>> separable_gram(
    std::size_t n, std::uint64_t seed, double margin = 6.0) {
  Rng rng(seed);
  std::vector<std::vector<double>> points;
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? +1 : -1;
    std::vector<double> x(4);
    for (auto& v : x) v = 2.0 * uniform_unit(rng) - 1.0;
    x[0] += y * margin;
    points.push_back(std::move(x));
    labels.push_back(y);
    ids.push_back("p" + std::to_string(i));
  }
  GramMatrix g(ids);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < 4; ++d) dot += points[i][d] * points[j][d];
      g.set_symmetric(i, j, dot);
    }
  return {std::move(g), std::move(labels)};
}

// Synthetic relation dataset: positives carry a three-word motif whose
// slots draw from four synonym clusters; negatives get decoy cluster
// words in scrambled positions. The companion matrix scores
// within-cluster pairs high.
struct MotifFixture {
  Dataset dataset;
  SubstitutionMatrix informative;
  std::vector<std::string> vocabulary;
};

inline MotifFixture motif_dataset(std::size_t n, std::uint64_t seed,
                                  double positive_rate = 0.4) {
  // Every instance shares the `w >nsubj w <dobj w` skeleton, so the
  // edge-identity rules carry no class signal; only the slot words
  // separate positives (cluster members) from negatives (fillers and
  // wrong-slot cluster decoys).
  const std::size_t cluster_size = 8;
  std::vector<std::vector<std::string>> clusters(4);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t w = 0; w < cluster_size; ++w)
      clusters[c].push_back("c" + std::to_string(c) + "w" +
                            std::to_string(w));
  std::vector<std::string> fillers;
  for (std::size_t w = 0; w < 40; ++w)
    fillers.push_back("f" + std::to_string(w));
  const std::vector<std::string> edges = {">prep_of", "<nn", ">amod",
                                          "<conj_and"};

  Rng rng(seed);
  auto pick = [&rng](const std::vector<std::string>& pool) {
    return pool[uniform_below(rng, pool.size())];
  };
  auto filler_run = [&](std::size_t max_words, PathSequence& path) {
    const std::size_t words = uniform_below(rng, max_words + 1);
    for (std::size_t i = 0; i < words; ++i) {
      path.push_back(parse_token(pick(edges)));
      path.push_back(Token::word(pick(fillers)));
    }
  };
  // a negative slot: usually a filler, sometimes a decoy from any
  // cluster other than the one the slot would need
  auto decoy = [&](std::size_t correct_cluster) {
    if (uniform_unit(rng) < 0.3) {
      std::size_t c = uniform_below(rng, 3);
      if (c >= correct_cluster) ++c;
      return pick(clusters[c]);
    }
    return pick(fillers);
  };

  std::vector<LabeledInstance> instances;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = uniform_unit(rng) < positive_rate;
    PathSequence path;
    path.push_back(Token::word(pick(fillers)));
    filler_run(2, path);
    std::string s1, s2, s3;
    if (positive) {
      s1 = pick(clusters[0]);
      s2 = pick(clusters[1]);
      s3 = pick(clusters[2 + uniform_below(rng, 2)]);
    } else {
      s1 = decoy(0);
      s2 = decoy(1);
      s3 = decoy(2 + uniform_below(rng, 2));
    }
    path.push_back(Token::word(s1));
    path.push_back(parse_token(">nsubj"));
    path.push_back(Token::word(s2));
    path.push_back(parse_token("<dobj"));
    path.push_back(Token::word(s3));
    filler_run(2, path);
    instances.push_back({"m" + std::to_string(i),
                         positive ? Label::positive : Label::negative,
                         std::move(path)});
  }
  Dataset ds(std::move(instances));

  WordPairScores scores;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t a = 0; a < cluster_size; ++a)
      for (std::size_t b = a + 1; b < cluster_size; ++b)
        scores.set(clusters[c][a], clusters[c][b], 0.9);
  for (const auto& a : clusters[2])
    for (const auto& b : clusters[3]) scores.set(a, b, 0.6);

  MotifFixture fixture;
  fixture.vocabulary = ds.word_vocabulary();
  fixture.dataset = std::move(ds);
  fixture.informative = SubstitutionMatrix::build(std::move(scores));
  return fixture;
}

// Contiguity-contrast fixture: positives and negatives carry identical
// token multisets in identical relative order and with matched lengths;
// the classes differ only in whether the three-slot motif is contiguous
// (positives) or interleaved with filler pairs (negatives). The class
// signal is therefore exactly the alignment structure that the scaling
// parameter amplifies.
inline MotifFixture contiguity_contrast_dataset(std::size_t n,
                                                std::uint64_t seed) {
  const std::size_t cluster_size = 8;
  std::vector<std::vector<std::string>> clusters(3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t w = 0; w < cluster_size; ++w)
      clusters[c].push_back("c" + std::to_string(c) + "w" +
                            std::to_string(w));
  std::vector<std::string> fillers;
  for (std::size_t w = 0; w < 40; ++w)
    fillers.push_back("f" + std::to_string(w));
  const std::vector<std::string> edges = {">prep_of", "<nn", ">amod"};

  Rng rng(seed);
  auto pick = [&rng](const std::vector<std::string>& pool) {
    return pool[uniform_below(rng, pool.size())];
  };
  std::vector<LabeledInstance> instances;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = uniform_unit(rng) < 0.5;
    const std::string w1 = pick(clusters[0]);
    const std::string w2 = pick(clusters[1]);
    const std::string w3 = pick(clusters[2]);
    const std::size_t g1 = 1 + uniform_below(rng, 2);
    const std::size_t g2 = 1 + uniform_below(rng, 2);
    std::vector<std::pair<std::string, std::string>> run1, run2;
    run1.push_back({">nsubj", pick(fillers)});
    for (std::size_t k = 1; k < g1; ++k)
      run1.push_back({pick(edges), pick(fillers)});
    run2.push_back({"<dobj", pick(fillers)});
    for (std::size_t k = 1; k < g2; ++k)
      run2.push_back({pick(edges), pick(fillers)});
    const std::string bridge1 = pick(edges), bridge2 = pick(edges);

    PathSequence path;
    path.push_back(Token::word(pick(fillers)));
    auto append_run =
        [&path](const std::vector<std::pair<std::string, std::string>>& run,
                std::size_t from) {
          for (std::size_t k = from; k < run.size(); ++k) {
            path.push_back(parse_token(run[k].first));
            path.push_back(Token::word(run[k].second));
          }
        };
    if (positive) {
      // contiguous motif, the displaced filler pairs pushed outside
      path.push_back(Token::word(w1));
      path.push_back(parse_token(run1.front().first));
      path.push_back(Token::word(w2));
      path.push_back(parse_token(run2.front().first));
      path.push_back(Token::word(w3));
      path.push_back(parse_token(bridge1));
      path.push_back(Token::word(run1.front().second));
      append_run(run1, 1);
      path.push_back(parse_token(bridge2));
      path.push_back(Token::word(run2.front().second));
      append_run(run2, 1);
    } else {
      // same tokens, same order, fillers interleaved inside the motif
      path.push_back(Token::word(w1));
      append_run(run1, 0);
      path.push_back(parse_token(bridge1));
      path.push_back(Token::word(w2));
      append_run(run2, 0);
      path.push_back(parse_token(bridge2));
      path.push_back(Token::word(w3));
    }
    instances.push_back({"m" + std::to_string(i),
                         positive ? Label::positive : Label::negative,
                         std::move(path)});
  }
  Dataset ds(std::move(instances));

  WordPairScores scores;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t a = 0; a < cluster_size; ++a)
      for (std::size_t b = a + 1; b < cluster_size; ++b)
        scores.set(clusters[c][a], clusters[c][b], 0.9);
  MotifFixture fixture;
  fixture.vocabulary = ds.word_vocabulary();
  fixture.dataset = std::move(ds);
  fixture.informative = SubstitutionMatrix::build(std::move(scores));
  return fixture;
}

}  // namespace lakern::testing
