#include "kgqa/rcnn.hpp"

#include <algorithm>
#include <cmath>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

namespace {

constexpr const char* kUnknownToken = "<unk>";

Vector tanh_vec(const Vector& x) {
  return x.unaryExpr([](double v) { return std::tanh(v); });
}

Vector tanh_grad(const Vector& activated) {
  return (1.0 - activated.array().square()).matrix();
}

void write_block(Vector& flat, int& offset, const Matrix& m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) flat(offset++) = m(r, c);
}

void write_block(Vector& flat, int& offset, const Vector& v) {
  for (int i = 0; i < v.size(); ++i) flat(offset++) = v(i);
}

void read_block(const Vector& flat, int& offset, Matrix& m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) m(r, c) = flat(offset++);
}

void read_block(const Vector& flat, int& offset, Vector& v) {
  for (int i = 0; i < v.size(); ++i) v(i) = flat(offset++);
}

}  // namespace

RcnnParams RcnnParams::create(const std::vector<std::string>& vocab,
                              int n_relations, const WordVectorTable& table,
                              const RcnnConfig& cfg, Rng& rng) {
  if (n_relations <= 0) throw ConfigError("rcnn needs at least one relation");
  if (table.dimension() != cfg.embed_dim) {
    throw ShapeError("word vector dimension does not match rcnn embed_dim");
  }

  RcnnParams p;
  p.cfg = cfg;
  p.n_relations = n_relations;
  p.vocab = vocab;
  if (std::find(p.vocab.begin(), p.vocab.end(), kUnknownToken) ==
      p.vocab.end()) {
    p.vocab.push_back(kUnknownToken);
  }
  for (std::size_t i = 0; i < p.vocab.size(); ++i) {
    p.vocab_index.emplace(p.vocab[i], static_cast<int>(i));
  }

  const int v = static_cast<int>(p.vocab.size());
  p.E = Matrix(v, cfg.embed_dim);
  for (int row = 0; row < v; ++row) {
    p.E.row(row) =
        table.vector_for_token(p.vocab[static_cast<std::size_t>(row)])
            .transpose();
  }

  p.Wl = uniform_init(cfg.context_dim, cfg.context_dim, cfg.context_dim, rng);
  p.Wr = uniform_init(cfg.context_dim, cfg.context_dim, cfg.context_dim, rng);
  p.Wsl = uniform_init(cfg.context_dim, cfg.embed_dim, cfg.embed_dim, rng);
  p.Wsr = uniform_init(cfg.context_dim, cfg.embed_dim, cfg.embed_dim, rng);
  p.cl0 = uniform_init_vector(cfg.context_dim, cfg.context_dim, rng);
  p.cr0 = uniform_init_vector(cfg.context_dim, cfg.context_dim, rng);
  const int feature = 2 * cfg.context_dim + cfg.embed_dim;
  p.W2 = uniform_init(cfg.hidden_dim, feature, feature, rng);
  p.b2 = uniform_init_vector(cfg.hidden_dim, feature, rng);
  p.Wout = uniform_init(n_relations, cfg.hidden_dim, cfg.hidden_dim, rng);
  p.bout = uniform_init_vector(n_relations, cfg.hidden_dim, rng);
  return p;
}

int RcnnParams::token_row(const std::string& token) const {
  const auto it = vocab_index.find(token);
  if (it != vocab_index.end()) return it->second;
  return vocab_index.at(kUnknownToken);
}

int RcnnParams::param_count() const {
  const int v = static_cast<int>(vocab.size());
  const int c = cfg.context_dim;
  const int d = cfg.embed_dim;
  const int h = cfg.hidden_dim;
  return v * d + 2 * c * c + 2 * c * d + 2 * c + h * (2 * c + d) + h +
         n_relations * h + n_relations;
}

Vector RcnnParams::to_flat() const {
  Vector flat(param_count());
  int offset = 0;
  write_block(flat, offset, E);
  write_block(flat, offset, Wl);
  write_block(flat, offset, Wr);
  write_block(flat, offset, Wsl);
  write_block(flat, offset, Wsr);
  write_block(flat, offset, cl0);
  write_block(flat, offset, cr0);
  write_block(flat, offset, W2);
  write_block(flat, offset, b2);
  write_block(flat, offset, Wout);
  write_block(flat, offset, bout);
  return flat;
}

void RcnnParams::from_flat(const Vector& flat) {
  if (flat.size() != param_count()) {
    throw ShapeError("RcnnParams::from_flat: size mismatch");
  }
  int offset = 0;
  read_block(flat, offset, E);
  read_block(flat, offset, Wl);
  read_block(flat, offset, Wr);
  read_block(flat, offset, Wsl);
  read_block(flat, offset, Wsr);
  read_block(flat, offset, cl0);
  read_block(flat, offset, cr0);
  read_block(flat, offset, W2);
  read_block(flat, offset, b2);
  read_block(flat, offset, Wout);
  read_block(flat, offset, bout);
}

Vector rcnn_forward(const RcnnParams& params,
                    const std::vector<std::string>& tokens,
                    RcnnCache* cache) {
  if (tokens.empty()) throw InputError("rcnn_forward: empty question");
  const std::size_t n = tokens.size();
  const int hidden = params.cfg.hidden_dim;

  std::vector<int> rows(n);
  std::vector<Vector> e(n);
  for (std::size_t t = 0; t < n; ++t) {
    rows[t] = params.token_row(fold_case(tokens[t]));
    e[t] = params.E.row(rows[t]).transpose();
  }

  // Left context scans forward, right context scans backward; boundary
  // states are learned parameters.
  std::vector<Vector> cl(n), cr(n);
  cl[0] = params.cl0;
  for (std::size_t t = 1; t < n; ++t) {
    cl[t] = tanh_vec(params.Wl * cl[t - 1] + params.Wsl * e[t - 1]);
  }
  cr[n - 1] = params.cr0;
  for (std::size_t t = n - 1; t-- > 0;) {
    cr[t] = tanh_vec(params.Wr * cr[t + 1] + params.Wsr * e[t + 1]);
  }

  std::vector<Vector> y(n);
  const int c_dim = params.cfg.context_dim;
  const int d = params.cfg.embed_dim;
  for (std::size_t t = 0; t < n; ++t) {
    Vector feature(2 * c_dim + d);
    feature << cl[t], e[t], cr[t];
    y[t] = tanh_vec(params.W2 * feature + params.b2);
  }

  Vector pooled(hidden);
  std::vector<int> argmax(static_cast<std::size_t>(hidden), 0);
  for (int k = 0; k < hidden; ++k) {
    double best = y[0](k);
    int best_t = 0;
    for (std::size_t t = 1; t < n; ++t) {
      if (y[t](k) > best) {
        best = y[t](k);
        best_t = static_cast<int>(t);
      }
    }
    pooled(k) = best;
    argmax[static_cast<std::size_t>(k)] = best_t;
  }

  const Vector logits = params.Wout * pooled + params.bout;
  const Vector probs = softmax(logits);

  if (cache) {
    cache->rows = std::move(rows);
    cache->e = std::move(e);
    cache->cl = std::move(cl);
    cache->cr = std::move(cr);
    cache->y = std::move(y);
    cache->pool_argmax = std::move(argmax);
    cache->pooled = pooled;
    cache->logits = logits;
    cache->probs = probs;
  }
  return probs;
}

RcnnParams rcnn_backward(const RcnnParams& params, const RcnnCache& cache,
                         const Vector& d_logits) {
  RcnnParams grads = params;  // copy for shapes/vocab, then zero the arrays
  grads.set_zero();
  rcnn_backward_accumulate(params, cache, d_logits, &grads);
  return grads;
}

void rcnn_backward_accumulate(const RcnnParams& params, const RcnnCache& cache,
                              const Vector& d_logits, RcnnParams* grads) {
  const std::size_t n = cache.e.size();
  const int hidden = params.cfg.hidden_dim;
  const int c_dim = params.cfg.context_dim;
  const int d = params.cfg.embed_dim;

  grads->Wout.noalias() += d_logits * cache.pooled.transpose();
  grads->bout += d_logits;
  const Vector d_pooled = params.Wout.transpose() * d_logits;

  // Max-pool routes each hidden coordinate back to its winning position.
  std::vector<Vector> dy(n, Vector::Zero(hidden));
  for (int k = 0; k < hidden; ++k) {
    dy[static_cast<std::size_t>(cache.pool_argmax[static_cast<std::size_t>(k)])](
        k) += d_pooled(k);
  }

  std::vector<Vector> dcl(n, Vector::Zero(c_dim));
  std::vector<Vector> dcr(n, Vector::Zero(c_dim));
  std::vector<Vector> de(n, Vector::Zero(d));
  Vector feature(2 * c_dim + d);
  for (std::size_t t = 0; t < n; ++t) {
    const Vector dz = dy[t].cwiseProduct(tanh_grad(cache.y[t]));
    feature << cache.cl[t], cache.e[t], cache.cr[t];
    grads->W2.noalias() += dz * feature.transpose();
    grads->b2 += dz;
    const Vector d_feature = params.W2.transpose() * dz;
    dcl[t] += d_feature.segment(0, c_dim);
    de[t] += d_feature.segment(c_dim, d);
    dcr[t] += d_feature.segment(c_dim + d, c_dim);
  }

  // Left context chain: cl[t] = tanh(Wl*cl[t-1] + Wsl*e[t-1]).
  for (std::size_t t = n; t-- > 1;) {
    const Vector da = dcl[t].cwiseProduct(tanh_grad(cache.cl[t]));
    grads->Wl.noalias() += da * cache.cl[t - 1].transpose();
    grads->Wsl.noalias() += da * cache.e[t - 1].transpose();
    dcl[t - 1].noalias() += params.Wl.transpose() * da;
    de[t - 1].noalias() += params.Wsl.transpose() * da;
  }
  grads->cl0 += dcl[0];

  // Right context chain: cr[t] = tanh(Wr*cr[t+1] + Wsr*e[t+1]).
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const Vector da = dcr[t].cwiseProduct(tanh_grad(cache.cr[t]));
    grads->Wr.noalias() += da * cache.cr[t + 1].transpose();
    grads->Wsr.noalias() += da * cache.e[t + 1].transpose();
    dcr[t + 1].noalias() += params.Wr.transpose() * da;
    de[t + 1].noalias() += params.Wsr.transpose() * da;
  }
  grads->cr0 += dcr[n - 1];

  for (std::size_t t = 0; t < n; ++t) {
    grads->E.row(cache.rows[t]) += de[t].transpose();
  }
}

void RcnnParams::set_zero() {
  E.setZero();
  Wl.setZero();
  Wr.setZero();
  Wsl.setZero();
  Wsr.setZero();
  cl0.setZero();
  cr0.setZero();
  W2.setZero();
  b2.setZero();
  Wout.setZero();
  bout.setZero();
}

void RcnnParams::add_scaled(const RcnnParams& other, double factor) {
  E += factor * other.E;
  Wl += factor * other.Wl;
  Wr += factor * other.Wr;
  Wsl += factor * other.Wsl;
  Wsr += factor * other.Wsr;
  cl0 += factor * other.cl0;
  cr0 += factor * other.cr0;
  W2 += factor * other.W2;
  b2 += factor * other.b2;
  Wout += factor * other.Wout;
  bout += factor * other.bout;
}

double RcnnParams::squared_norm() const {
  return E.squaredNorm() + Wl.squaredNorm() + Wr.squaredNorm() +
         Wsl.squaredNorm() + Wsr.squaredNorm() + cl0.squaredNorm() +
         cr0.squaredNorm() + W2.squaredNorm() + b2.squaredNorm() +
         Wout.squaredNorm() + bout.squaredNorm();
}

void RcnnParams::scale(double factor) {
  E *= factor;
  Wl *= factor;
  Wr *= factor;
  Wsl *= factor;
  Wsr *= factor;
  cl0 *= factor;
  cr0 *= factor;
  W2 *= factor;
  b2 *= factor;
  Wout *= factor;
  bout *= factor;
}

RcnnTrainResult train_rcnn(const std::vector<RcnnExample>& train,
                           const std::vector<RcnnExample>& dev,
                           int n_relations, const WordVectorTable& table,
                           const RcnnConfig& rcnn_cfg, const SgdConfig& sgd) {
  if (train.empty()) throw DataError("train_rcnn: empty training set");
  for (const auto& ex : train) {
    if (ex.gold < 0 || ex.gold >= n_relations) {
      throw DataError("train_rcnn: relation id out of range");
    }
  }

  // Vocabulary in first-appearance order, plus the mask placeholder.
  std::vector<std::string> vocab;
  std::unordered_map<std::string, int> seen;
  auto add_token = [&](const std::string& token) {
    if (seen.emplace(token, 1).second) vocab.push_back(token);
  };
  add_token(kEntityPlaceholder);
  for (const auto& ex : train) {
    for (const auto& token : ex.tokens) add_token(fold_case(token));
  }

  Rng rng(sgd.seed);
  RcnnParams params =
      RcnnParams::create(vocab, n_relations, table, rcnn_cfg, rng);

  auto mean_loss = [&](const RcnnParams& p) {
    double total = 0.0;
    for (const auto& ex : train) {
      total += cross_entropy(rcnn_forward(p, ex.tokens), ex.gold);
    }
    return total / static_cast<double>(train.size());
  };

  RcnnTrainResult result;
  result.losses.push_back(mean_loss(params));

  const bool has_dev = !dev.empty();
  RcnnParams best = params;
  double best_metric = has_dev ? rcnn_accuracy(params, dev) : -result.losses[0];
  double plateau_metric = best_metric;
  int best_epoch = 0;
  int stale = 0;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  RcnnParams grads = params;
  RcnnCache cache;
  const int batch_size = std::max(1, sgd.batch_size);
  for (int epoch = 1; epoch <= sgd.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      grads.set_zero();
      for (std::size_t k = start; k < stop; ++k) {
        const RcnnExample& ex = train[order[k]];
        const Vector probs = rcnn_forward(params, ex.tokens, &cache);
        epoch_loss += cross_entropy(probs, ex.gold);
        Vector d_logits = probs;
        d_logits(ex.gold) -= 1.0;
        rcnn_backward_accumulate(params, cache, d_logits, &grads);
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      const double norm = std::sqrt(grads.squared_norm());
      if (norm > sgd.clip_norm && norm > 0.0) grads.scale(sgd.clip_norm / norm);
      params.add_scaled(grads, -sgd.learning_rate);
    }
    result.losses.push_back(epoch_loss / static_cast<double>(train.size()));

    const double metric = has_dev ? rcnn_accuracy(params, dev)
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
  result.best_dev_accuracy = has_dev ? best_metric : 0.0;
  result.best_epoch = best_epoch;
  return result;
}

double rcnn_accuracy(const RcnnParams& params,
                     const std::vector<RcnnExample>& examples) {
  if (examples.empty()) return 0.0;
  int correct = 0;
  for (const auto& ex : examples) {
    const Vector probs = rcnn_forward(params, ex.tokens);
    int arg = 0;
    probs.maxCoeff(&arg);
    if (arg == ex.gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

double RelationWeights::at(RelationId r) const {
  if (r < 0 || static_cast<std::size_t>(r) >= w.size()) {
    throw ConfigError("missing relational weight for relation id " +
                      std::to_string(r));
  }
  return w[static_cast<std::size_t>(r)];
}

RelationWeights relation_weights(const Vector& probs, WeightMode mode) {
  RelationWeights weights;
  if (mode == WeightMode::kUniform) {
    weights.w.assign(static_cast<std::size_t>(probs.size()), 1.0);
    return weights;
  }
  weights.w.resize(static_cast<std::size_t>(probs.size()));
  for (int i = 0; i < probs.size(); ++i) {
    weights.w[static_cast<std::size_t>(i)] = probs(i);
  }
  return weights;
}

RelationWeights uniform_weights(int n_relations) {
  RelationWeights weights;
  weights.w.assign(static_cast<std::size_t>(n_relations), 1.0);
  return weights;
}

}  // namespace kgqa
