#include "kgqa/training.hpp"

#include <algorithm>
#include <set>

#include "kgqa/errors.hpp"
#include "kgqa/propagation.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

namespace {

struct PreparedQuestion {
  std::vector<std::string> masked;
  std::vector<EntityId> entities;
  Subgraph sub;
  RelationId gold_relation = -1;
};

bool prepare_question(const KnowledgeGraph& kg, const QAExample& ex,
                      PreparedQuestion* out) {
  const auto tokens = tokenize(ex.question);
  if (tokens.empty()) return false;
  std::vector<Mention> mentions;
  try {
    mentions = link_entities(tokens, kg);
  } catch (const NoEntityError&) {
    return false;
  }
  const auto rid = kg.find_relation(ex.relation);
  if (!rid) return false;
  out->masked = mask_mentions(tokens, mentions);
  out->entities = question_entities(mentions);
  out->sub = extract_subgraph(kg, out->entities);
  out->gold_relation = *rid;
  return true;
}

// The gold supernode has the gold relation and is anchored to every
// question entity (the shared supernode in the multi-entity case).
int find_gold_supernode(const SummaryGraph& summary, RelationId relation) {
  std::vector<EntityId> wanted = summary.question_entities;
  std::sort(wanted.begin(), wanted.end());
  for (const Supernode& sn : summary.supernodes) {
    if (sn.relation == relation && sn.anchors == wanted) return sn.id;
  }
  return -1;
}

}  // namespace

std::vector<TrainingExample> prepare_training_examples(
    const KnowledgeGraph& kg, const WordVectorTable& table,
    const std::vector<QAExample>& dataset, const Models& models,
    bool uniform_weights, int* skipped) {
  auto vec_of = [&](EntityId id) {
    return entity_vector(kg.entity_name(id), table);
  };

  std::vector<TrainingExample> examples;
  int skip_count = 0;
  for (const QAExample& ex : dataset) {
    PreparedQuestion prep;
    if (!prepare_question(kg, ex, &prep)) {
      ++skip_count;
      continue;
    }

    TrainingExample te;
    try {
      te.summary = summarize(prep.sub);
    } catch (const EmptySummaryError&) {
      ++skip_count;
      continue;
    }
    te.tokens = prep.masked;
    te.gold_supernode = find_gold_supernode(te.summary, prep.gold_relation);
    if (te.gold_supernode < 0) {
      ++skip_count;
      continue;
    }
    te.gold_members =
        te.summary.supernodes[static_cast<std::size_t>(te.gold_supernode)]
            .members;

    RelationWeights weights;
    if (uniform_weights) {
      weights = kgqa::uniform_weights(static_cast<int>(kg.relation_count()));
    } else {
      weights = relation_weights(rcnn_forward(models.rcnn, te.tokens),
                                 WeightMode::kRcnn);
    }

    std::vector<Vector> inits;
    inits.reserve(te.summary.supernodes.size());
    for (const Supernode& sn : te.summary.supernodes) {
      inits.push_back(supernode_init(sn, vec_of));
    }
    te.H = propagate(te.summary, inits, vec_of, weights);
    examples.push_back(std::move(te));
  }
  if (skipped) *skipped = skip_count;
  return examples;
}

std::pair<Models, TrainReport> train_system(const KnowledgeGraph& kg,
                                            const WordVectorTable& table,
                                            const std::vector<QAExample>& train,
                                            const std::vector<QAExample>& dev,
                                            const TrainOptions& options) {
  if (train.empty()) throw DataError("train_system: empty training set");
  if (table.dimension() != options.rcnn.embed_dim) {
    throw ConfigError("word vector dimension does not match embed_dim");
  }

  Models models;
  models.embed_dim = options.rcnn.embed_dim;
  models.lstm_hidden = options.lstm_hidden;
  models.weight_mode = options.uniform_weights ? "uniform" : "rcnn";
  models.seed = options.sgd.seed;
  for (std::size_t r = 0; r < kg.relation_count(); ++r) {
    models.relation_names.push_back(
        kg.relation_name(static_cast<RelationId>(r)));
  }

  TrainReport report;

  // Stage 1: relation classifier on entity-masked questions.
  if (!options.uniform_weights) {
    std::vector<RcnnExample> rcnn_train, rcnn_dev;
    auto collect = [&](const std::vector<QAExample>& source,
                       std::vector<RcnnExample>& sink) {
      for (const QAExample& ex : source) {
        PreparedQuestion prep;
        if (!prepare_question(kg, ex, &prep)) continue;
        sink.push_back({prep.masked, prep.gold_relation});
      }
    };
    collect(train, rcnn_train);
    collect(dev, rcnn_dev);
    if (rcnn_train.empty()) {
      throw DataError("train_system: no usable relation-classifier examples");
    }

    RcnnTrainResult rcnn_result =
        train_rcnn(rcnn_train, rcnn_dev, static_cast<int>(kg.relation_count()),
                   table, options.rcnn, options.sgd);
    models.rcnn = std::move(rcnn_result.params);
    models.has_rcnn = true;
    report.rcnn_losses = std::move(rcnn_result.losses);
    report.rcnn_best_dev_accuracy = rcnn_result.best_dev_accuracy;
    report.rcnn_best_epoch = rcnn_result.best_epoch;
  }

  // Stage 2: question encoder against frozen supernode embeddings.
  int skipped_train = 0;
  int skipped_dev = 0;
  const auto train_examples = prepare_training_examples(
      kg, table, train, models, options.uniform_weights, &skipped_train);
  const auto dev_examples = prepare_training_examples(
      kg, table, dev, models, options.uniform_weights, &skipped_dev);
  if (train_examples.empty()) {
    throw DataError("train_system: no usable selector examples");
  }

  SgdConfig selector_sgd = options.sgd;
  selector_sgd.seed = options.sgd.seed + 1;  // distinct stream from the RCNN
  SelectorTrainResult selector_result =
      train_selector(train_examples, dev_examples, table, models.embed_dim,
                     options.lstm_hidden, selector_sgd);
  models.selector = std::move(selector_result.params);

  report.n_train = static_cast<int>(train_examples.size());
  report.n_dev = static_cast<int>(dev_examples.size());
  report.skipped = skipped_train + skipped_dev;
  report.selector_losses = std::move(selector_result.losses);
  report.selector_best_dev_hits = selector_result.best_dev_hits;
  report.selector_best_epoch = selector_result.best_epoch;
  return {std::move(models), std::move(report)};
}

}  // namespace kgqa
