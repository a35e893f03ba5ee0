#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "kgqa/errors.hpp"
#include "kgqa/selection.hpp"

using namespace kgqa;

namespace {

SummaryGraph singleton_summary(int n, int members_per_node = 1) {
  SummaryGraph summary;
  for (int i = 0; i < n; ++i) {
    Supernode sn;
    sn.id = i;
    for (int m = 0; m < members_per_node; ++m) {
      sn.members.push_back(100 * i + m);
    }
    sn.relation = 0;
    summary.supernodes.push_back(std::move(sn));
  }
  return summary;
}

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-1, 1);
  return m;
}

Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1, 1);
  return v;
}

TrainingExample make_example(Rng& rng, int n_supernodes, int dim,
                             const std::vector<std::string>& tokens, int gold) {
  TrainingExample ex;
  ex.tokens = tokens;
  ex.summary = singleton_summary(n_supernodes);
  ex.H = random_matrix(rng, n_supernodes, dim);
  ex.gold_supernode = gold;
  ex.gold_members = ex.summary.supernodes[static_cast<std::size_t>(gold)].members;
  return ex;
}

}  // namespace

TEST_CASE("zero parameters encode every question to the zero vector") {
  SelectorParams params;
  params.lstm = LstmParams::zeros(4, 3);
  params.proj = Matrix::Zero(4, 3);
  const WordVectorTable table(4);
  const Vector q = encode_question(params, {"who", "did", "what"}, table);
  CHECK(q.norm() == 0.0);
}

TEST_CASE("encoding is deterministic") {
  Rng rng(1);
  SelectorParams params = SelectorParams::create(5, 4, rng);
  const WordVectorTable table(5);
  const Vector a = encode_question(params, {"same", "question"}, table);
  const Vector b = encode_question(params, {"same", "question"}, table);
  CHECK((a - b).norm() == 0.0);
  CHECK_THROWS_AS(encode_question(params, {}, table), InputError);
}

TEST_CASE("a single supernode is selected with probability one") {
  Matrix H(1, 3);
  H << 0.3, -0.2, 0.9;
  Vector q(3);
  q << 1.0, 0.0, 0.0;
  const auto pred = select_answer(H, q, singleton_summary(1));
  CHECK(pred.supernode_id == 0);
  CHECK(pred.probability == doctest::Approx(1.0));
  CHECK(pred.members == std::vector<EntityId>{0});
}

TEST_CASE("identical rows tie to the smaller supernode id") {
  Matrix H(3, 2);
  H << 0.5, 0.5, 0.5, 0.5, 0.1, 0.1;
  Vector q(2);
  q << 1.0, 1.0;
  const auto pred = select_answer(H, q, singleton_summary(3));
  CHECK(pred.supernode_id == 0);
}

TEST_CASE("softmax argmax equals the raw score argmax") {
  Rng rng(3);
  for (int round = 0; round < 200; ++round) {
    const int n = rng.uniform_int(2, 12);
    const int d = rng.uniform_int(2, 6);
    const Matrix H = random_matrix(rng, n, d);
    const Vector q = random_vector(rng, d);
    const Vector scores = H * q;
    int raw = 0;
    for (int i = 1; i < n; ++i) {
      if (scores(i) > scores(raw)) raw = i;
    }
    CHECK(select_answer(H, q, singleton_summary(n)).supernode_id == raw);
  }
}

TEST_CASE("adding a constant to all scores keeps the argmax") {
  Rng rng(5);
  for (int round = 0; round < 100; ++round) {
    const int n = rng.uniform_int(2, 10);
    const int d = rng.uniform_int(2, 5);
    const Matrix H = random_matrix(rng, n, d);
    const Vector q = random_vector(rng, d);

    // Appending an all-ones column with weight c shifts every score by c.
    Matrix H_shift(n, d + 1);
    H_shift << H, Matrix::Ones(n, 1);
    Vector q_shift(d + 1);
    q_shift << q, rng.uniform(-10, 10);

    CHECK(select_answer(H, q, singleton_summary(n)).supernode_id ==
          select_answer(H_shift, q_shift, singleton_summary(n)).supernode_id);
  }
}

TEST_CASE("permuting supernodes permutes the prediction consistently") {
  Rng rng(7);
  const int n = 6, d = 4;
  const Matrix H = random_matrix(rng, n, d);
  const Vector q = random_vector(rng, d);
  const SummaryGraph summary = singleton_summary(n);
  const auto base = select_answer(H, q, summary);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);

  Matrix H_perm(n, d);
  SummaryGraph perm_summary;
  for (int i = 0; i < n; ++i) {
    H_perm.row(i) = H.row(perm[static_cast<std::size_t>(i)]);
    Supernode sn = summary.supernodes[static_cast<std::size_t>(
        perm[static_cast<std::size_t>(i)])];
    sn.id = i;
    perm_summary.supernodes.push_back(std::move(sn));
  }
  const auto moved = select_answer(H_perm, q, perm_summary);
  CHECK(moved.members == base.members);
  CHECK(moved.probability == doctest::Approx(base.probability));
}

TEST_CASE("selection loss gradient matches finite differences") {
  for (std::uint64_t seed : {11u, 13u}) {
    Rng rng(seed);
    const int dim = 5, hidden = 4;
    SelectorParams params = SelectorParams::create(dim, hidden, rng);
    const WordVectorTable table(dim);
    const std::vector<std::string> tokens = {"who", "wrote", "<ent>"};
    const Matrix H = random_matrix(rng, 4, dim);
    const int gold = 2;

    auto loss = [&](const Vector& flat) {
      SelectorParams p = params;
      p.from_flat(flat);
      const Vector q = encode_question(p, tokens, table);
      return cross_entropy(softmax(H * q), gold);
    };

    LstmCache cache;
    const Vector q = encode_question(params, tokens, table, &cache);
    Vector d_scores = softmax(H * q);
    d_scores(gold) -= 1.0;
    const Vector dq = H.transpose() * d_scores;
    const Matrix d_proj = dq * cache.h.back().transpose();
    const LstmParams d_lstm =
        lstm_backward(params.lstm, cache, params.proj.transpose() * dq);

    Vector analytic(params.param_count());
    analytic.head(d_lstm.param_count()) = d_lstm.to_flat();
    int offset = d_lstm.param_count();
    for (int c = 0; c < d_proj.cols(); ++c)
      for (int r = 0; r < d_proj.rows(); ++r) analytic(offset++) = d_proj(r, c);

    const auto result = grad_check(loss, params.to_flat(), analytic);
    CHECK(result.max_rel_err < 1e-4);
  }
}

TEST_CASE("a single example is memorized to near-certainty") {
  Rng rng(17);
  const int dim = 6, hidden = 5;
  std::vector<TrainingExample> train = {
      make_example(rng, 3, dim, {"who", "wrote", "<ent>"}, 1)};

  SgdConfig sgd;
  sgd.seed = 99;
  sgd.learning_rate = 0.2;
  sgd.epochs = 400;
  sgd.patience = 400;
  const WordVectorTable table(dim);
  const auto result = train_selector(train, {}, table, dim, hidden, sgd);

  const Vector q = encode_question(result.params, train[0].tokens, table);
  const Vector probs = selection_probs(train[0].H, q);
  CHECK(probs(1) > 0.99);
}

TEST_CASE("training loss drops after the first epoch on 100 examples") {
  Rng rng(19);
  const int dim = 5, hidden = 4;
  std::vector<TrainingExample> train;
  for (int i = 0; i < 100; ++i) {
    const bool wrote = i % 2 == 0;
    train.push_back(make_example(
        rng, 3, dim,
        {wrote ? "who" : "which", wrote ? "wrote" : "directed", "<ent>"},
        wrote ? 0 : 1));
  }
  SgdConfig sgd;
  sgd.seed = 7;
  sgd.epochs = 1;
  const WordVectorTable table(dim);
  const auto result = train_selector(train, {}, table, dim, hidden, sgd);
  REQUIRE(result.losses.size() >= 2);
  CHECK(result.losses[1] < result.losses[0]);
}

TEST_CASE("gold supernode outside the summary is rejected") {
  Rng rng(23);
  auto ex = make_example(rng, 2, 4, {"who"}, 0);
  ex.gold_supernode = 5;
  const WordVectorTable table(4);
  CHECK_THROWS_AS(train_selector({ex}, {}, table, 4, 3, SgdConfig{}), DataError);
}
