#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kgqa/nn.hpp"

namespace kgqa {

struct RcnnConfig {
  int embed_dim = 150;
  int context_dim = 50;
  int hidden_dim = 100;
};

// Recurrent convolutional text classifier: per-token left/right recurrent
// context features concatenated with the token embedding, a tanh projection,
// elementwise max-pooling over positions, and a softmax output over the
// relation set. Token embeddings are fine-tuned during training.
struct RcnnParams {
  RcnnConfig cfg;
  int n_relations = 0;

  std::vector<std::string> vocab;  // row order of E
  std::unordered_map<std::string, int> vocab_index;

  Matrix E;          // vocab x embed
  Matrix Wl, Wr;     // context x context
  Matrix Wsl, Wsr;   // context x embed
  Vector cl0, cr0;   // boundary context states
  Matrix W2;         // hidden x (2*context + embed)
  Vector b2;
  Matrix Wout;       // n_relations x hidden
  Vector bout;

  static RcnnParams create(const std::vector<std::string>& vocab,
                           int n_relations, const WordVectorTable& table,
                           const RcnnConfig& cfg, Rng& rng);

  int token_row(const std::string& token) const;  // <unk> fallback

  int param_count() const;
  Vector to_flat() const;
  void from_flat(const Vector& flat);

  // In-place arithmetic for minibatch accumulation and updates.
  void set_zero();
  void add_scaled(const RcnnParams& other, double factor);
  double squared_norm() const;
  void scale(double factor);
};

struct RcnnCache {
  std::vector<int> rows;            // embedding row per position
  std::vector<Vector> e, cl, cr;    // per-position features
  std::vector<Vector> y;            // tanh hidden per position
  std::vector<int> pool_argmax;     // winning position per hidden coordinate
  Vector pooled, logits, probs;
};

// Probabilities of the question belonging to each relation.
Vector rcnn_forward(const RcnnParams& params,
                    const std::vector<std::string>& tokens,
                    RcnnCache* cache = nullptr);

// Backprop from d(loss)/d(logits); returns RcnnParams-shaped gradients.
RcnnParams rcnn_backward(const RcnnParams& params, const RcnnCache& cache,
                         const Vector& d_logits);

// Same, but adds into an existing accumulator (no per-call allocation).
void rcnn_backward_accumulate(const RcnnParams& params, const RcnnCache& cache,
                              const Vector& d_logits, RcnnParams* grads);

struct RcnnExample {
  std::vector<std::string> tokens;  // entity-masked question tokens
  RelationId gold = -1;
};

struct RcnnTrainResult {
  RcnnParams params;                // best-validation checkpoint
  std::vector<double> losses;       // index 0 = loss at initialization
  double best_dev_accuracy = 0.0;
  int best_epoch = 0;
};

RcnnTrainResult train_rcnn(const std::vector<RcnnExample>& train,
                           const std::vector<RcnnExample>& dev,
                           int n_relations, const WordVectorTable& table,
                           const RcnnConfig& rcnn_cfg, const SgdConfig& sgd);

double rcnn_accuracy(const RcnnParams& params,
                     const std::vector<RcnnExample>& examples);

enum class WeightMode { kRcnn, kUniform };

// Per-relation propagation weights, indexed by RelationId.
struct RelationWeights {
  std::vector<double> w;

  double at(RelationId r) const;  // ConfigError when r is not covered
};

// rcnn mode copies the classifier distribution; uniform mode sets every
// weight to 1 so propagation reduces to an unweighted neighborhood mean.
RelationWeights relation_weights(const Vector& probs, WeightMode mode);
RelationWeights uniform_weights(int n_relations);

}  // namespace kgqa
