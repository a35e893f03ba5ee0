#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgqa/checkpoint.hpp"
#include "kgqa/dataset.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/pipeline.hpp"
#include "kgqa/selection.hpp"

namespace kgqa {

struct TrainOptions {
  SgdConfig sgd;                  // shared defaults; selector derives its seed
  RcnnConfig rcnn;
  int lstm_hidden = 100;
  bool uniform_weights = false;   // noRCNN: skip the classifier entirely
};

struct TrainReport {
  int n_train = 0;
  int n_dev = 0;
  int skipped = 0;  // examples without a resolvable gold supernode
  std::vector<double> rcnn_losses;
  double rcnn_best_dev_accuracy = 0.0;
  int rcnn_best_epoch = 0;
  std::vector<double> selector_losses;
  double selector_best_dev_hits = 0.0;
  int selector_best_epoch = 0;
};

// Supervision construction: the gold supernode is the one whose relation is
// the example's gold relation and whose anchors are exactly the question
// entities. Examples that cannot be linked or grouped are skipped and
// counted.
std::vector<TrainingExample> prepare_training_examples(
    const KnowledgeGraph& kg, const WordVectorTable& table,
    const std::vector<QAExample>& dataset, const Models& models,
    bool uniform_weights, int* skipped);

// Two-stage training: the relation classifier first, then the question
// encoder against frozen supernode embeddings.
std::pair<Models, TrainReport> train_system(const KnowledgeGraph& kg,
                                            const WordVectorTable& table,
                                            const std::vector<QAExample>& train,
                                            const std::vector<QAExample>& dev,
                                            const TrainOptions& options);

}  // namespace kgqa
