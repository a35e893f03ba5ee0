#pragma once

#include <string>
#include <vector>

#include "kgqa/nn.hpp"
#include "kgqa/propagation.hpp"

namespace kgqa {

// Question encoder: LSTM over the masked token embeddings, final hidden
// state mapped into the supernode embedding space by a learned linear
// projection so the Eq-style dot product is well defined.
struct SelectorParams {
  LstmParams lstm;
  Matrix proj;  // embed_dim x hidden_dim

  static SelectorParams create(int embed_dim, int hidden_dim, Rng& rng);

  int param_count() const;
  Vector to_flat() const;
  void from_flat(const Vector& flat);
};

Vector encode_question(const SelectorParams& params,
                       const std::vector<std::string>& tokens,
                       const WordVectorTable& table,
                       LstmCache* cache = nullptr);

struct AnswerPrediction {
  int supernode_id = -1;
  double probability = 0.0;
  std::vector<EntityId> members;
};

Vector selection_probs(const EmbeddingMatrix& H, const Vector& q);

// Argmax of softmax(H q) over supernodes; ties break to the smallest id.
AnswerPrediction select_answer(const EmbeddingMatrix& H, const Vector& q,
                               const SummaryGraph& summary);

struct TrainingExample {
  std::vector<std::string> tokens;  // masked question tokens
  SummaryGraph summary;
  EmbeddingMatrix H;  // frozen during selector training
  int gold_supernode = -1;
  std::vector<EntityId> gold_members;
};

struct SelectorTrainResult {
  SelectorParams params;       // best-validation checkpoint
  std::vector<double> losses;  // index 0 = loss at initialization
  double best_dev_hits = 0.0;
  int best_epoch = 0;
};

// Cross-entropy of the gold supernode under softmax(H q); gradients flow
// through the projection and the LSTM only (H is fixed per example).
SelectorTrainResult train_selector(const std::vector<TrainingExample>& train,
                                   const std::vector<TrainingExample>& dev,
                                   const WordVectorTable& table, int embed_dim,
                                   int hidden_dim, const SgdConfig& sgd);

}  // namespace kgqa
