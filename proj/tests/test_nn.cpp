#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kgqa/errors.hpp"
#include "kgqa/nn.hpp"

using namespace kgqa;

namespace {

Vector random_vector(Rng& rng, int n, double lo = -2.0, double hi = 2.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("softmax of a symmetric pair") {
  Vector logits(2);
  logits << 0.0, 0.0;
  const Vector p = softmax(logits);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));
}

TEST_CASE("softmax survives large logits without overflow") {
  Vector logits(2);
  logits << 1000.0, 0.0;
  const Vector p = softmax(logits);
  CHECK(std::isfinite(p(0)));
  CHECK(p(0) == doctest::Approx(1.0));
  CHECK(p(1) == doctest::Approx(0.0));
}

TEST_CASE("softmax matches the naive exp/sum oracle") {
  Rng rng(1);
  const Vector logits = random_vector(rng, 10);
  const Vector p = softmax(logits);

  double z = 0.0;
  for (int i = 0; i < 10; ++i) z += std::exp(logits(i));
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(p(i) - std::exp(logits(i)) / z) <= 1e-12);
  }
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
}

TEST_CASE("sgd_step arithmetic") {
  Vector p(1), g(1);
  p << 1.0;
  g << 1.0;
  sgd_step(p, g, 0.01);
  CHECK(p(0) == doctest::Approx(0.99));

  Vector zero = Vector::Zero(1);
  Vector q(1);
  q << 0.99;
  sgd_step(q, zero, 0.01);
  CHECK(q(0) == doctest::Approx(0.99));

  Vector wrong(2);
  CHECK_THROWS_AS(sgd_step(p, wrong, 0.01), ShapeError);
}

TEST_CASE("sgd walks down a quadratic bowl") {
  // f(p) = p^2, so each step multiplies p by (1 - 2*lr); from p=1 with
  // lr=0.01 one hundred steps land near 0.98^100 ~ 0.1326.
  Vector p(1);
  p << 1.0;
  for (int i = 0; i < 100; ++i) {
    Vector g(1);
    g << 2.0 * p(0);
    sgd_step(p, g, 0.01);
  }
  CHECK(std::abs(p(0)) < 0.2);
  CHECK(p(0) == doctest::Approx(std::pow(0.98, 100)));
}

TEST_CASE("gradient clip rescales to the requested norm") {
  Vector g(2);
  g << 3.0, 4.0;  // norm 5
  Vector big = g * 10.0;
  const double scale = clip_gradient(big, 5.0);
  CHECK(big.norm() == doctest::Approx(5.0));
  CHECK(scale == doctest::Approx(0.1));

  Vector small(2);
  small << 0.1, 0.1;
  CHECK(clip_gradient(small, 5.0) == 1.0);
}

TEST_CASE("all-zero LSTM parameters yield a zero final state") {
  const auto params = LstmParams::zeros(3, 4);
  Rng rng(2);
  std::vector<Vector> inputs;
  for (int t = 0; t < 5; ++t) inputs.push_back(random_vector(rng, 3));
  const Vector h = lstm_forward(params, inputs);
  CHECK(h.norm() == 0.0);
}

TEST_CASE("length-1 LSTM equals the closed-form single step") {
  Rng rng(3);
  const auto params = LstmParams::random(3, 4, rng);
  const Vector x = random_vector(rng, 3);
  const Vector h = lstm_forward(params, {x});

  // Independent arithmetic with zero initial state.
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (int k = 0; k < 4; ++k) {
    const double i = sig((params.Wi * x)(k) + params.bi(k));
    const double f = sig((params.Wf * x)(k) + params.bf(k));
    (void)f;  // multiplies a zero cell state
    const double o = sig((params.Wo * x)(k) + params.bo(k));
    const double g = std::tanh((params.Wg * x)(k) + params.bg(k));
    const double c = i * g;
    CHECK(std::abs(h(k) - o * std::tanh(c)) <= 1e-12);
  }
}

TEST_CASE("LSTM rejects mismatched input dimensions") {
  const auto params = LstmParams::zeros(3, 4);
  CHECK_THROWS_AS(lstm_forward(params, {Vector::Zero(2)}), ShapeError);
  CHECK_THROWS_AS(lstm_forward(params, {}), InputError);
}

TEST_CASE("LSTM backward matches central finite differences") {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    Rng rng(seed);
    const int in_dim = 3, hidden = 4, steps = 4;
    const auto params = LstmParams::random(in_dim, hidden, rng);
    std::vector<Vector> inputs;
    for (int t = 0; t < steps; ++t) inputs.push_back(random_vector(rng, in_dim, -1, 1));
    const Vector target = random_vector(rng, hidden, -1, 1);

    auto loss = [&](const Vector& flat) {
      LstmParams p = LstmParams::zeros(in_dim, hidden);
      p.from_flat(flat);
      const Vector h = lstm_forward(p, inputs);
      return 0.5 * (h - target).squaredNorm();
    };

    LstmCache cache;
    const Vector h = lstm_forward(params, inputs, &cache);
    const auto grads = lstm_backward(params, cache, h - target);

    const auto result = grad_check(loss, params.to_flat(), grads.to_flat());
    CHECK(result.max_rel_err < 1e-4);
  }
}

TEST_CASE("grad_check on an analytic quadratic is near-exact") {
  Rng rng(5);
  const Vector x = random_vector(rng, 6);
  auto f = [](const Vector& v) { return v.squaredNorm(); };
  const Vector analytic = 2.0 * x;
  const auto result = grad_check(f, x, analytic);
  CHECK(result.max_rel_err < 1e-8);
}

TEST_CASE("LSTM flat round-trip preserves parameters") {
  Rng rng(8);
  const auto params = LstmParams::random(3, 5, rng);
  auto other = LstmParams::zeros(3, 5);
  other.from_flat(params.to_flat());
  CHECK((other.to_flat() - params.to_flat()).norm() == 0.0);
}
