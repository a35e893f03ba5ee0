#pragma once

#include <string>
#include <vector>

#include "kgqa/checkpoint.hpp"
#include "kgqa/dataset.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/linking.hpp"
#include "kgqa/summarize.hpp"

namespace kgqa {

struct ModeFlags {
  bool summarization = true;     // false = noGS: singleton candidates
  bool uniform_weights = false;  // true = noRCNN: all relational weights 1
  bool explain = false;
};

struct ScoredSupernode {
  int supernode_id;
  double probability;
  std::vector<std::string> members;
};

struct AskResult {
  std::vector<std::string> answers;  // chosen supernode's member names
  int supernode_id = -1;
  double probability = 0.0;

  // Diagnostics (populated when ModeFlags::explain is set).
  std::vector<Mention> mentions;
  std::string summary_text;
  std::vector<double> relation_weights;  // by RelationId
  std::vector<ScoredSupernode> top_supernodes;
};

// Full pipeline: link -> subgraph -> summarize -> init -> weights ->
// propagate -> select. Throws NoEntityError / EmptySummaryError with
// user-readable messages when a stage cannot proceed.
AskResult answer_question(const KnowledgeGraph& kg, const WordVectorTable& table,
                          const Models& models, const std::string& question,
                          const ModeFlags& flags);

// Checkpoint/KG consistency: every stored relation name must resolve, and
// the classifier (when present) must cover the KG relation count.
void validate_models(const Models& models, const KnowledgeGraph& kg);

struct QuestionRecord {
  std::string question;
  bool hit = false;
  double recall = 0.0;
  std::vector<std::string> predicted;
  std::string error;  // non-empty when the pipeline failed for this question
};

struct Metrics {
  int n_questions = 0;
  int n_errors = 0;
  double hits_at_1 = 0.0;
  double recall = 0.0;      // mean answer recall over hit questions
  double recall_all = 0.0;  // same numerator averaged over all questions
  double rcnn_accuracy = -1.0;  // -1 when not evaluated
  std::vector<QuestionRecord> records;
};

// Scores one prediction against a gold answer set: hit when the sets
// intersect (names compared case-insensitively), recall = |pred & gold| /
// |gold|.
void score_prediction(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold,
                      QuestionRecord* record);

// Pure aggregation over already-scored records.
Metrics metrics_from_records(std::vector<QuestionRecord> records, int n_errors,
                             double rcnn_accuracy);

// Runs answer_question per example; a hit means the predicted set intersects
// the gold set. Per-question pipeline errors count as misses. With
// multi_answer_only, questions with fewer than two gold answers are skipped.
Metrics evaluate(const KnowledgeGraph& kg, const WordVectorTable& table,
                 const Models& models, const std::vector<QAExample>& dataset,
                 const ModeFlags& flags, bool multi_answer_only = false);

}  // namespace kgqa
