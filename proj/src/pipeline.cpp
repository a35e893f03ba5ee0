#include "kgqa/pipeline.hpp"

#include <algorithm>
#include <set>

#include "kgqa/errors.hpp"
#include "kgqa/propagation.hpp"
#include "kgqa/selection.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

void validate_models(const Models& models, const KnowledgeGraph& kg) {
  if (models.relation_names.size() != kg.relation_count()) {
    throw ConfigError("model was trained for " +
                      std::to_string(models.relation_names.size()) +
                      " relations but the KG has " +
                      std::to_string(kg.relation_count()));
  }
  for (std::size_t i = 0; i < models.relation_names.size(); ++i) {
    const auto id = kg.find_relation(models.relation_names[i]);
    if (!id || *id != static_cast<RelationId>(i)) {
      throw ConfigError("model relation \"" + models.relation_names[i] +
                        "\" does not match the KG relation order");
    }
  }
  if (models.has_rcnn &&
      models.rcnn.n_relations != static_cast<int>(kg.relation_count())) {
    throw ConfigError("classifier output size does not match KG relations");
  }
}

AskResult answer_question(const KnowledgeGraph& kg, const WordVectorTable& table,
                          const Models& models, const std::string& question,
                          const ModeFlags& flags) {
  const auto tokens = tokenize(question);
  if (tokens.empty()) throw InputError("empty question");

  const auto mentions = link_entities(tokens, kg);
  const auto entities = question_entities(mentions);
  const Subgraph sub = extract_subgraph(kg, entities);

  const SummaryGraph summary =
      flags.summarization ? summarize(sub) : summarize_none(sub);

  const auto masked = mask_mentions(tokens, mentions);

  RelationWeights weights;
  if (flags.uniform_weights) {
    weights = uniform_weights(static_cast<int>(kg.relation_count()));
  } else {
    if (!models.has_rcnn) {
      throw ConfigError(
          "model has no relation classifier; use uniform relation weights");
    }
    weights = relation_weights(rcnn_forward(models.rcnn, masked),
                               WeightMode::kRcnn);
  }

  auto vec_of = [&](EntityId id) {
    return entity_vector(kg.entity_name(id), table);
  };
  std::vector<Vector> inits;
  inits.reserve(summary.supernodes.size());
  for (const Supernode& sn : summary.supernodes) {
    inits.push_back(supernode_init(sn, vec_of));
  }

  const EmbeddingMatrix H = propagate(summary, inits, vec_of, weights);
  const Vector q = encode_question(models.selector, masked, table);
  const Vector probs = selection_probs(H, q);
  const AnswerPrediction prediction = select_answer(H, q, summary);

  AskResult result;
  result.supernode_id = prediction.supernode_id;
  result.probability = prediction.probability;
  for (EntityId member : prediction.members) {
    result.answers.push_back(kg.entity_name(member));
  }

  if (flags.explain) {
    result.mentions = mentions;
    result.summary_text = summary_to_text(summary, kg);
    result.relation_weights = weights.w;
    std::vector<int> order(static_cast<std::size_t>(probs.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (probs(a) != probs(b)) return probs(a) > probs(b);
      return a < b;
    });
    for (std::size_t k = 0; k < order.size() && k < 3; ++k) {
      ScoredSupernode scored;
      scored.supernode_id = order[k];
      scored.probability = probs(order[k]);
      for (EntityId member :
           summary.supernodes[static_cast<std::size_t>(order[k])].members) {
        scored.members.push_back(kg.entity_name(member));
      }
      result.top_supernodes.push_back(std::move(scored));
    }
  }
  return result;
}

void score_prediction(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold,
                      QuestionRecord* record) {
  std::set<std::string> gold_norm;
  for (const auto& a : gold) gold_norm.insert(normalize_name(a));
  record->predicted = predicted;
  int overlap = 0;
  for (const auto& p : predicted) {
    if (gold_norm.count(normalize_name(p))) ++overlap;
  }
  record->hit = overlap > 0;
  record->recall = gold_norm.empty()
                       ? 0.0
                       : static_cast<double>(overlap) /
                             static_cast<double>(gold_norm.size());
}

Metrics metrics_from_records(std::vector<QuestionRecord> records, int n_errors,
                             double rcnn_accuracy) {
  Metrics metrics;
  metrics.records = std::move(records);
  metrics.n_errors = n_errors;
  metrics.rcnn_accuracy = rcnn_accuracy;
  metrics.n_questions = static_cast<int>(metrics.records.size());

  int hits = 0;
  double recall_hit_sum = 0.0;
  double recall_all_sum = 0.0;
  for (const QuestionRecord& r : metrics.records) {
    if (r.hit) {
      ++hits;
      recall_hit_sum += r.recall;
    }
    recall_all_sum += r.recall;
  }
  if (metrics.n_questions > 0) {
    metrics.hits_at_1 =
        static_cast<double>(hits) / static_cast<double>(metrics.n_questions);
    metrics.recall_all = recall_all_sum / metrics.n_questions;
  }
  if (hits > 0) metrics.recall = recall_hit_sum / hits;
  return metrics;
}

Metrics evaluate(const KnowledgeGraph& kg, const WordVectorTable& table,
                 const Models& models, const std::vector<QAExample>& dataset,
                 const ModeFlags& flags, bool multi_answer_only) {
  std::vector<QuestionRecord> records;
  int n_errors = 0;
  int rcnn_correct = 0;
  int rcnn_total = 0;

  for (const QAExample& ex : dataset) {
    if (multi_answer_only && ex.answers.size() < 2) continue;

    QuestionRecord record;
    record.question = ex.question;
    try {
      const AskResult result =
          answer_question(kg, table, models, ex.question, flags);
      score_prediction(result.answers, ex.answers, &record);
    } catch (const Error& e) {
      record.error = e.what();
      ++n_errors;
    }

    // Relation-classifier accuracy rides along when possible.
    if (models.has_rcnn && !ex.relation.empty()) {
      if (const auto rid = kg.find_relation(ex.relation)) {
        try {
          const auto tokens = tokenize(ex.question);
          const auto mentions = link_entities(tokens, kg);
          const Vector probs =
              rcnn_forward(models.rcnn, mask_mentions(tokens, mentions));
          int arg = 0;
          probs.maxCoeff(&arg);
          ++rcnn_total;
          if (arg == *rid) ++rcnn_correct;
        } catch (const Error&) {
          ++rcnn_total;  // unanswerable counts as a classifier miss too
        }
      }
    }

    records.push_back(std::move(record));
  }

  const double rcnn_accuracy =
      rcnn_total > 0 ? static_cast<double>(rcnn_correct) / rcnn_total : -1.0;
  return metrics_from_records(std::move(records), n_errors, rcnn_accuracy);
}

}  // namespace kgqa
