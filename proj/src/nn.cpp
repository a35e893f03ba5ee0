#include "kgqa/nn.hpp"

#include <algorithm>
#include <cmath>

#include "kgqa/errors.hpp"

namespace kgqa {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vector sigmoid_vec(const Vector& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

Vector tanh_vec(const Vector& x) {
  return x.unaryExpr([](double v) { return std::tanh(v); });
}

// Flat layout helpers shared by to_flat/from_flat.
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

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw InputError("softmax of empty vector");
  const double top = logits.maxCoeff();
  const Vector exps = (logits.array() - top).exp().matrix();
  return exps / exps.sum();
}

double cross_entropy(const Vector& probs, int gold) {
  if (gold < 0 || gold >= probs.size()) {
    throw InputError("gold index out of range");
  }
  return -std::log(std::max(probs(gold), 1e-300));
}

void sgd_step(Vector& params, const Vector& grads, double learning_rate) {
  if (params.size() != grads.size()) {
    throw ShapeError("sgd_step: parameter/gradient size mismatch");
  }
  params -= learning_rate * grads;
}

double clip_gradient(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm <= max_norm || norm == 0.0) return 1.0;
  const double scale = max_norm / norm;
  grad *= scale;
  return scale;
}

Matrix uniform_init(int rows, int cols, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

Vector uniform_init_vector(int size, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = rng.uniform(-bound, bound);
  return v;
}

LstmParams LstmParams::zeros(int input_dim, int hidden_dim) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.Wi = p.Wf = p.Wo = p.Wg = Matrix::Zero(hidden_dim, input_dim);
  p.Ui = p.Uf = p.Uo = p.Ug = Matrix::Zero(hidden_dim, hidden_dim);
  p.bi = p.bf = p.bo = p.bg = Vector::Zero(hidden_dim);
  return p;
}

LstmParams LstmParams::random(int input_dim, int hidden_dim, Rng& rng) {
  LstmParams p = zeros(input_dim, hidden_dim);
  for (Matrix* m : {&p.Wi, &p.Wf, &p.Wo, &p.Wg}) {
    *m = uniform_init(hidden_dim, input_dim, input_dim, rng);
  }
  for (Matrix* m : {&p.Ui, &p.Uf, &p.Uo, &p.Ug}) {
    *m = uniform_init(hidden_dim, hidden_dim, hidden_dim, rng);
  }
  for (Vector* v : {&p.bi, &p.bf, &p.bo, &p.bg}) {
    *v = uniform_init_vector(hidden_dim, hidden_dim, rng);
  }
  return p;
}

int LstmParams::param_count() const {
  return 4 * hidden_dim * input_dim + 4 * hidden_dim * hidden_dim +
         4 * hidden_dim;
}

Vector LstmParams::to_flat() const {
  Vector flat(param_count());
  int offset = 0;
  for (const Matrix* m : {&Wi, &Wf, &Wo, &Wg, &Ui, &Uf, &Uo, &Ug}) {
    write_block(flat, offset, *m);
  }
  for (const Vector* v : {&bi, &bf, &bo, &bg}) write_block(flat, offset, *v);
  return flat;
}

void LstmParams::from_flat(const Vector& flat) {
  if (flat.size() != param_count()) {
    throw ShapeError("LstmParams::from_flat: size mismatch");
  }
  int offset = 0;
  for (Matrix* m : {&Wi, &Wf, &Wo, &Wg, &Ui, &Uf, &Uo, &Ug}) {
    read_block(flat, offset, *m);
  }
  for (Vector* v : {&bi, &bf, &bo, &bg}) read_block(flat, offset, *v);
}

void LstmParams::set_zero() {
  for (Matrix* m : {&Wi, &Wf, &Wo, &Wg, &Ui, &Uf, &Uo, &Ug}) m->setZero();
  for (Vector* v : {&bi, &bf, &bo, &bg}) v->setZero();
}

void LstmParams::add_scaled(const LstmParams& other, double factor) {
  Wi += factor * other.Wi;
  Wf += factor * other.Wf;
  Wo += factor * other.Wo;
  Wg += factor * other.Wg;
  Ui += factor * other.Ui;
  Uf += factor * other.Uf;
  Uo += factor * other.Uo;
  Ug += factor * other.Ug;
  bi += factor * other.bi;
  bf += factor * other.bf;
  bo += factor * other.bo;
  bg += factor * other.bg;
}

double LstmParams::squared_norm() const {
  double total = 0.0;
  for (const Matrix* m : {&Wi, &Wf, &Wo, &Wg, &Ui, &Uf, &Uo, &Ug}) {
    total += m->squaredNorm();
  }
  for (const Vector* v : {&bi, &bf, &bo, &bg}) total += v->squaredNorm();
  return total;
}

void LstmParams::scale(double factor) {
  for (Matrix* m : {&Wi, &Wf, &Wo, &Wg, &Ui, &Uf, &Uo, &Ug}) *m *= factor;
  for (Vector* v : {&bi, &bf, &bo, &bg}) *v *= factor;
}

Vector lstm_forward(const LstmParams& params, const std::vector<Vector>& inputs,
                    LstmCache* cache) {
  if (inputs.empty()) throw InputError("lstm_forward: empty input sequence");
  for (const Vector& x : inputs) {
    if (x.size() != params.input_dim) {
      throw ShapeError("lstm_forward: input dimension mismatch");
    }
  }

  const int hidden = params.hidden_dim;
  Vector h = Vector::Zero(hidden);
  Vector c = Vector::Zero(hidden);
  if (cache) {
    cache->x = inputs;
    const std::size_t T = inputs.size();
    cache->i.resize(T);
    cache->f.resize(T);
    cache->o.resize(T);
    cache->g.resize(T);
    cache->c.resize(T);
    cache->h.resize(T);
  }

  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const Vector& x = inputs[t];
    const Vector i = sigmoid_vec(params.Wi * x + params.Ui * h + params.bi);
    const Vector f = sigmoid_vec(params.Wf * x + params.Uf * h + params.bf);
    const Vector o = sigmoid_vec(params.Wo * x + params.Uo * h + params.bo);
    const Vector g = tanh_vec(params.Wg * x + params.Ug * h + params.bg);
    c = f.cwiseProduct(c) + i.cwiseProduct(g);
    h = o.cwiseProduct(tanh_vec(c));
    if (cache) {
      cache->i[t] = i;
      cache->f[t] = f;
      cache->o[t] = o;
      cache->g[t] = g;
      cache->c[t] = c;
      cache->h[t] = h;
    }
  }
  return h;
}

LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache,
                         const Vector& d_final_hidden) {
  LstmParams grads = LstmParams::zeros(params.input_dim, params.hidden_dim);
  lstm_backward_accumulate(params, cache, d_final_hidden, &grads);
  return grads;
}

void lstm_backward_accumulate(const LstmParams& params, const LstmCache& cache,
                              const Vector& d_final_hidden, LstmParams* grads) {
  const std::size_t T = cache.x.size();
  if (T == 0) throw InputError("lstm_backward: empty cache");
  if (d_final_hidden.size() != params.hidden_dim) {
    throw ShapeError("lstm_backward: gradient dimension mismatch");
  }

  const Vector zero = Vector::Zero(params.hidden_dim);
  Vector dh = d_final_hidden;
  Vector dc = Vector::Zero(params.hidden_dim);
  Vector do_pre(params.hidden_dim), di_pre(params.hidden_dim),
      df_pre(params.hidden_dim), dg_pre(params.hidden_dim),
      tanh_c(params.hidden_dim);

  for (std::size_t t = T; t-- > 0;) {
    const auto i = cache.i[t].array();
    const auto f = cache.f[t].array();
    const auto o = cache.o[t].array();
    const auto g = cache.g[t].array();
    tanh_c = cache.c[t].array().tanh().matrix();
    const Vector& c_prev = t == 0 ? zero : cache.c[t - 1];
    const Vector& h_prev = t == 0 ? zero : cache.h[t - 1];

    do_pre = (dh.array() * tanh_c.array() * o * (1.0 - o)).matrix();
    dc.array() += dh.array() * o * (1.0 - tanh_c.array().square());
    di_pre = (dc.array() * g * i * (1.0 - i)).matrix();
    df_pre = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();
    dg_pre = (dc.array() * i * (1.0 - g.square())).matrix();

    grads->Wi.noalias() += di_pre * cache.x[t].transpose();
    grads->Wf.noalias() += df_pre * cache.x[t].transpose();
    grads->Wo.noalias() += do_pre * cache.x[t].transpose();
    grads->Wg.noalias() += dg_pre * cache.x[t].transpose();
    grads->Ui.noalias() += di_pre * h_prev.transpose();
    grads->Uf.noalias() += df_pre * h_prev.transpose();
    grads->Uo.noalias() += do_pre * h_prev.transpose();
    grads->Ug.noalias() += dg_pre * h_prev.transpose();
    grads->bi += di_pre;
    grads->bf += df_pre;
    grads->bo += do_pre;
    grads->bg += dg_pre;

    dh.noalias() = params.Ui.transpose() * di_pre;
    dh.noalias() += params.Uf.transpose() * df_pre;
    dh.noalias() += params.Uo.transpose() * do_pre;
    dh.noalias() += params.Ug.transpose() * dg_pre;
    dc.array() *= f;
  }
}

GradCheckResult grad_check(const std::function<double(const Vector&)>& f,
                           const Vector& point, const Vector& analytic_grad,
                           double eps) {
  if (point.size() != analytic_grad.size()) {
    throw ShapeError("grad_check: gradient size mismatch");
  }
  GradCheckResult result;
  Vector probe = point;
  for (int k = 0; k < point.size(); ++k) {
    const double saved = probe(k);
    probe(k) = saved + eps;
    const double up = f(probe);
    probe(k) = saved - eps;
    const double down = f(probe);
    probe(k) = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double analytic = analytic_grad(k);
    const double denom =
        std::max(1e-6, std::abs(numeric) + std::abs(analytic));
    const double rel = std::abs(numeric - analytic) / denom;
    if (rel > result.max_rel_err) {
      result.max_rel_err = rel;
      result.worst_coord = k;
      result.analytic_at_worst = analytic;
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace kgqa
