#pragma once

// Builders assembling a substitution matrix over a dataset's word
// vocabulary from either corpus co-occurrence statistics or a concept
// taxonomy.

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lakern/distributional.hpp"
#include "lakern/substitution.hpp"
#include "lakern/taxonomy.hpp"
#include "lakern/token.hpp"

namespace lakern {

inline SubstitutionMatrix build_distributional_matrix(
    const Dataset& ds, std::istream& corpus, DistributionalMeasure measure,
    WindowSpec window = {}) {
  const auto vocab = ds.word_vocabulary();
  const std::set<std::string> targets(vocab.begin(), vocab.end());
  const ContextCounts counts = count_contexts(corpus, targets, window);
  return SubstitutionMatrix::build(
      build_word_scores(counts, vocab, measure));
}

// Scores every pair of taxonomy-annotated words through the relatedness
// measure (normalized over that pair population); all other pairs are
// left unstored so lookup falls back to exact matching.
inline SubstitutionMatrix build_taxonomy_matrix(const Dataset& ds,
                                                const Taxonomy& taxonomy,
                                                TaxonomyMeasure measure) {
  // word key -> concept id, for annotated words whose concept exists
  std::map<std::string, std::string> concept_of;
  for (const auto& inst : ds)
    for (const auto& tok : inst.path)
      if (tok.is_word() && !tok.annotation.empty() &&
          taxonomy.has(tok.annotation))
        concept_of.emplace(tok.key(), tok.annotation);

  std::vector<ConceptPairScore> population;
  std::vector<std::pair<std::string, std::string>> word_pairs;
  for (auto a = concept_of.begin(); a != concept_of.end(); ++a)
    for (auto b = a; b != concept_of.end(); ++b) {
      population.push_back(
          {a->second, b->second,
           taxonomy.similarity(measure, a->second, b->second)});
      word_pairs.emplace_back(a->first, b->first);
    }

  WordPairScores scores;
  if (!population.empty()) {
    const auto normalized = normalize_measure(measure, population);
    for (std::size_t i = 0; i < normalized.size(); ++i)
      scores.set(word_pairs[i].first, word_pairs[i].second,
                 normalized[i].value);
  }
  return SubstitutionMatrix::build(std::move(scores));
}

}  // namespace lakern
