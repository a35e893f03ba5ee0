#include "kgqa/selection.hpp"

#include <algorithm>

#include "kgqa/errors.hpp"

namespace kgqa {

SelectorParams SelectorParams::create(int embed_dim, int hidden_dim,
                                      Rng& rng) {
  SelectorParams p;
  p.lstm = LstmParams::random(embed_dim, hidden_dim, rng);
  p.proj = uniform_init(embed_dim, hidden_dim, hidden_dim, rng);
  return p;
}

int SelectorParams::param_count() const {
  return lstm.param_count() +
         static_cast<int>(proj.rows() * proj.cols());
}

Vector SelectorParams::to_flat() const {
  const Vector lstm_flat = lstm.to_flat();
  Vector flat(param_count());
  flat.head(lstm_flat.size()) = lstm_flat;
  int offset = static_cast<int>(lstm_flat.size());
  for (int c = 0; c < proj.cols(); ++c)
    for (int r = 0; r < proj.rows(); ++r) flat(offset++) = proj(r, c);
  return flat;
}

void SelectorParams::from_flat(const Vector& flat) {
  if (flat.size() != param_count()) {
    throw ShapeError("SelectorParams::from_flat: size mismatch");
  }
  lstm.from_flat(flat.head(lstm.param_count()));
  int offset = lstm.param_count();
  for (int c = 0; c < proj.cols(); ++c)
    for (int r = 0; r < proj.rows(); ++r) proj(r, c) = flat(offset++);
}

Vector encode_question(const SelectorParams& params,
                       const std::vector<std::string>& tokens,
                       const WordVectorTable& table, LstmCache* cache) {
  if (tokens.empty()) throw InputError("encode_question: empty question");
  std::vector<Vector> inputs;
  inputs.reserve(tokens.size());
  for (const std::string& token : tokens) {
    inputs.push_back(table.vector_for_token(token));
  }
  const Vector hidden = lstm_forward(params.lstm, inputs, cache);
  return params.proj * hidden;
}

Vector selection_probs(const EmbeddingMatrix& H, const Vector& q) {
  if (H.rows() == 0) throw InputError("selection over empty summary");
  if (H.cols() != q.size()) {
    throw ShapeError("selection_probs: dimension mismatch");
  }
  return softmax(H * q);
}

AnswerPrediction select_answer(const EmbeddingMatrix& H, const Vector& q,
                               const SummaryGraph& summary) {
  const Vector probs = selection_probs(H, q);
  int best = 0;
  for (int i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = i;  // ties keep the smaller id
  }
  AnswerPrediction prediction;
  prediction.supernode_id = best;
  prediction.probability = probs(best);
  prediction.members =
      summary.supernodes.at(static_cast<std::size_t>(best)).members;
  return prediction;
}

namespace {

bool intersects(const std::vector<EntityId>& a, const std::vector<EntityId>& b) {
  for (EntityId x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

double dev_hits_at_1(const SelectorParams& params,
                     const std::vector<TrainingExample>& dev,
                     const WordVectorTable& table) {
  if (dev.empty()) return 0.0;
  int hits = 0;
  for (const TrainingExample& ex : dev) {
    const Vector q = encode_question(params, ex.tokens, table);
    const AnswerPrediction pred = select_answer(ex.H, q, ex.summary);
    if (intersects(pred.members, ex.gold_members)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dev.size());
}

}  // namespace

SelectorTrainResult train_selector(const std::vector<TrainingExample>& train,
                                   const std::vector<TrainingExample>& dev,
                                   const WordVectorTable& table, int embed_dim,
                                   int hidden_dim, const SgdConfig& sgd) {
  if (train.empty()) throw DataError("train_selector: empty training set");
  for (const TrainingExample& ex : train) {
    if (ex.gold_supernode < 0 ||
        ex.gold_supernode >= static_cast<int>(ex.summary.supernodes.size())) {
      throw DataError("train_selector: gold supernode out of range");
    }
  }

  Rng rng(sgd.seed);
  SelectorParams params = SelectorParams::create(embed_dim, hidden_dim, rng);

  auto example_loss = [&](const SelectorParams& p, const TrainingExample& ex) {
    const Vector q = encode_question(p, ex.tokens, table);
    return cross_entropy(selection_probs(ex.H, q), ex.gold_supernode);
  };

  auto mean_loss = [&](const SelectorParams& p) {
    double total = 0.0;
    for (const TrainingExample& ex : train) total += example_loss(p, ex);
    return total / static_cast<double>(train.size());
  };

  SelectorTrainResult result;
  result.losses.push_back(mean_loss(params));

  const bool has_dev = !dev.empty();
  SelectorParams best = params;
  double best_metric =
      has_dev ? dev_hits_at_1(params, dev, table) : -result.losses[0];
  double plateau_metric = best_metric;
  int best_epoch = 0;
  int stale = 0;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  LstmParams lstm_grads = LstmParams::zeros(embed_dim, hidden_dim);
  Matrix proj_grads = Matrix::Zero(embed_dim, hidden_dim);
  LstmCache cache;
  const int batch_size = std::max(1, sgd.batch_size);
  for (int epoch = 1; epoch <= sgd.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      lstm_grads.set_zero();
      proj_grads.setZero();
      for (std::size_t k = start; k < stop; ++k) {
        const TrainingExample& ex = train[order[k]];
        const Vector q = encode_question(params, ex.tokens, table, &cache);
        const Vector probs = selection_probs(ex.H, q);
        epoch_loss += cross_entropy(probs, ex.gold_supernode);

        Vector d_scores = probs;
        d_scores(ex.gold_supernode) -= 1.0;
        const Vector dq = ex.H.transpose() * d_scores;
        proj_grads.noalias() += dq * cache.h.back().transpose();
        lstm_backward_accumulate(params.lstm, cache,
                                 params.proj.transpose() * dq, &lstm_grads);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      lstm_grads.scale(inv);
      proj_grads *= inv;
      const double norm =
          std::sqrt(lstm_grads.squared_norm() + proj_grads.squaredNorm());
      if (norm > sgd.clip_norm && norm > 0.0) {
        const double shrink = sgd.clip_norm / norm;
        lstm_grads.scale(shrink);
        proj_grads *= shrink;
      }
      params.lstm.add_scaled(lstm_grads, -sgd.learning_rate);
      params.proj -= sgd.learning_rate * proj_grads;
    }
    result.losses.push_back(epoch_loss / static_cast<double>(train.size()));

    const double metric = has_dev ? dev_hits_at_1(params, dev, table)
                                  : -result.losses.back();
    if (metric > best_metric) {
      best_metric = metric;
      best = params;
      best_epoch = epoch;
    }
    if (metric >= plateau_metric + sgd.min_delta) {
      plateau_metric = metric;
      stale = 0;
    } else if (++stale >= sgd.patience) {
      break;
    }
  }

  result.params = std::move(best);
  result.best_dev_hits = has_dev ? best_metric : 0.0;
  result.best_epoch = best_epoch;
  return result;
}

}  // namespace kgqa
