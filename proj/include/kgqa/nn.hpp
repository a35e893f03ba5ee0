#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "kgqa/embedding.hpp"
#include "kgqa/util.hpp"

namespace kgqa {

struct SgdConfig {
  double learning_rate = 0.01;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;  // global l2 gradient clip
  int patience = 5;        // early stop after this many epochs w/o improvement
  double min_delta = 0.005;  // metric gain below this does not reset patience
};

// Numerically stable softmax (max subtraction).
Vector softmax(const Vector& logits);

// -log(probs[gold]); probs must be a valid distribution.
double cross_entropy(const Vector& probs, int gold);

// p <- p - lr * g, elementwise; shapes must match.
void sgd_step(Vector& params, const Vector& grads, double learning_rate);

// Scales grad in place so its l2 norm is at most max_norm; returns the
// factor applied (1.0 when already within bounds).
double clip_gradient(Vector& grad, double max_norm);

// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Matrix uniform_init(int rows, int cols, int fan_in, Rng& rng);
Vector uniform_init_vector(int size, int fan_in, Rng& rng);

struct LstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  Matrix Wi, Wf, Wo, Wg;  // hidden x input
  Matrix Ui, Uf, Uo, Ug;  // hidden x hidden
  Vector bi, bf, bo, bg;

  static LstmParams zeros(int input_dim, int hidden_dim);
  static LstmParams random(int input_dim, int hidden_dim, Rng& rng);

  int param_count() const;
  Vector to_flat() const;
  void from_flat(const Vector& flat);

  // In-place arithmetic for minibatch accumulation and updates.
  void set_zero();
  void add_scaled(const LstmParams& other, double factor);
  double squared_norm() const;
  void scale(double factor);
};

struct LstmCache {
  std::vector<Vector> x;           // inputs per step
  std::vector<Vector> i, f, o, g;  // gate activations per step
  std::vector<Vector> c, h;        // states per step
};

// Standard LSTM recurrence with zero initial hidden/cell state; returns the
// final hidden state and (optionally) the activations needed for backprop.
Vector lstm_forward(const LstmParams& params, const std::vector<Vector>& inputs,
                    LstmCache* cache = nullptr);

// Backprop from a gradient on the final hidden state; returns parameter
// gradients in an LstmParams-shaped struct.
LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache,
                         const Vector& d_final_hidden);

// Same, but adds into an existing accumulator (no per-call allocation).
void lstm_backward_accumulate(const LstmParams& params, const LstmCache& cache,
                              const Vector& d_final_hidden, LstmParams* grads);

struct GradCheckResult {
  double max_rel_err = 0.0;
  int worst_coord = -1;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Central finite differences against an analytic gradient, per coordinate.
GradCheckResult grad_check(const std::function<double(const Vector&)>& f,
                           const Vector& point, const Vector& analytic_grad,
                           double eps = 1e-5);

}  // namespace kgqa
