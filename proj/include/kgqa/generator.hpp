#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgqa/dataset.hpp"

namespace kgqa {

// Synthetic movie-domain benchmark: a bipartite-flavored KG with
// multi-answer structure, templated single-entity questions, and two-entity
// intersection questions with planted shared neighbors.
struct GeneratorConfig {
  std::uint64_t seed = 7;
  int movies = 140;
  int persons = 55;
  int genres = 8;
  int years = 20;
  int single_questions = 2000;
  int two_entity_questions = 500;
  int embed_dim = 150;
  double train_fraction = 0.7;
  double dev_fraction = 0.15;
};

struct SyntheticDataset {
  std::string kg_text;       // triple-file content
  std::string vectors_text;  // word-vector file content
  std::vector<QAExample> train, dev, test;

  int n_questions = 0;
  double multi_answer_fraction = 0.0;
  int n_entities = 0;
  int n_relations = 0;
  int n_triples = 0;
};

SyntheticDataset generate_synthetic(const GeneratorConfig& config);

}  // namespace kgqa
