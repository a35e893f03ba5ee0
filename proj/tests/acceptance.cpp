// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgqa/checkpoint.hpp"
#include "kgqa/cli.hpp"
#include "kgqa/embedding.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/generator.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/linking.hpp"
#include "kgqa/nn.hpp"
#include "kgqa/pipeline.hpp"
#include "kgqa/propagation.hpp"
#include "kgqa/rcnn.hpp"
#include "kgqa/selection.hpp"
#include "kgqa/summarize.hpp"
#include "kgqa/training.hpp"
#include "kgqa/util.hpp"

using namespace kgqa;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int index, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"gskgqa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Vector random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

// ---------------------------------------------------------------------------
// 1. Grouping-correctness oracle on 200 random subgraphs.
// ---------------------------------------------------------------------------
void criterion_1() {
  const auto start = Clock::now();
  Rng rng(1001);
  int verified_graphs = 0;
  int verified_supernodes = 0;
  int mismatches = 0;

  while (verified_graphs < 200) {
    std::string text;
    const int n_entities = rng.uniform_int(8, 16);
    const int n_relations = rng.uniform_int(2, 4);
    const int n_triples = rng.uniform_int(20, 60);
    for (int i = 0; i < n_triples; ++i) {
      const int h = rng.uniform_int(0, n_entities - 1);
      int t = rng.uniform_int(0, n_entities - 1);
      if (t == h) t = (t + 1) % n_entities;
      text += "e" + std::to_string(h) + "\tr" +
              std::to_string(rng.uniform_int(0, n_relations - 1)) + "\te" +
              std::to_string(t) + "\n";
    }
    const auto kg = KnowledgeGraph::load_triples(text);

    const int n_centers = 1 + verified_graphs % 3;  // even 1/2/3-entity mix
    std::vector<EntityId> centers;
    while (static_cast<int>(centers.size()) < n_centers) {
      const EntityId e =
          rng.uniform_int(0, static_cast<int>(kg.entity_count()) - 1);
      if (std::find(centers.begin(), centers.end(), e) == centers.end()) {
        centers.push_back(e);
      }
    }

    SummaryGraph summary;
    try {
      summary = summarize(extract_subgraph(kg, centers));
    } catch (const EmptySummaryError&) {
      continue;
    }
    const auto grouping = verify_grouping(summary, kg);
    verified_supernodes += static_cast<int>(grouping.checks.size());
    mismatches += grouping.mismatches;
    ++verified_graphs;
  }

  const double elapsed = seconds_since(start);
  const bool ok = mismatches == 0 && elapsed < 5.0;
  report(1, "grouping-correctness oracle", ok,
         fmt("%d subgraphs, %d supernodes, %d mismatches (%.2fs, limit 5s)",
             verified_graphs, verified_supernodes, mismatches, elapsed));
}

// ---------------------------------------------------------------------------
// 2. Propagation equivalence against a naive double loop.
// ---------------------------------------------------------------------------
void criterion_2() {
  const auto start = Clock::now();
  Rng rng(2002);
  double worst = 0.0;
  for (int round = 0; round < 100; ++round) {
    const int dim = rng.uniform_int(2, 16);
    const int n_supernodes = rng.uniform_int(1, 30);
    const int n_anchors = rng.uniform_int(1, 3);
    const int n_relations = rng.uniform_int(1, 4);

    SummaryGraph summary;
    std::map<EntityId, Vector> anchors;
    for (int a = 0; a < n_anchors; ++a) {
      summary.question_entities.push_back(500 + a);
      anchors[500 + a] = random_vector(rng, dim);
    }
    std::vector<Vector> inits;
    for (int i = 0; i < n_supernodes; ++i) {
      summary.supernodes.push_back({i, {i}, 0, {}});
      inits.push_back(random_vector(rng, dim));
      const int degree = rng.uniform_int(0, n_anchors);
      for (int e = 0; e < degree; ++e) {
        summary.edges.push_back(
            {static_cast<EntityId>(500 + e),
             static_cast<RelationId>(rng.uniform_int(0, n_relations - 1)), i});
      }
    }
    RelationWeights weights;
    for (int r = 0; r < n_relations; ++r) weights.w.push_back(rng.uniform(0, 1));

    const auto H = propagate(summary, inits,
                             [&](EntityId e) { return anchors.at(e); }, weights);

    for (int i = 0; i < n_supernodes; ++i) {
      Vector sum = inits[static_cast<std::size_t>(i)];
      int degree = 0;
      for (const SummaryEdge& edge : summary.edges) {
        if (edge.supernode != i) continue;
        sum += anchors.at(edge.anchor) *
               weights.w[static_cast<std::size_t>(edge.relation)];
        ++degree;
      }
      const Vector expected = sum / (1.0 + degree);
      worst = std::max(
          worst, (H.row(i).transpose() - expected).cwiseAbs().maxCoeff());
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = worst <= 1e-12 && elapsed < 5.0;
  report(2, "propagation equals the naive double loop", ok,
         fmt("100 graphs, max |delta| = %.3e (tol 1e-12), %.2fs", worst,
             elapsed));
}

// ---------------------------------------------------------------------------
// 3. Supernode initialization equals the naive mean; permutation invariant.
// ---------------------------------------------------------------------------
void criterion_3() {
  Rng rng(3003);
  double worst_mean = 0.0;
  double worst_perm = 0.0;
  for (int round = 0; round < 200; ++round) {
    const int dim = rng.uniform_int(2, 16);
    const int n_members = rng.uniform_int(1, 9);
    std::vector<Vector> vecs;
    Supernode sn;
    sn.relation = 0;
    for (int i = 0; i < n_members; ++i) {
      sn.members.push_back(i);
      vecs.push_back(random_vector(rng, dim));
    }
    auto lookup = [&](EntityId id) { return vecs[static_cast<std::size_t>(id)]; };

    const Vector h0 = supernode_init(sn, lookup);
    Vector naive = Vector::Zero(dim);
    for (const Vector& v : vecs) naive += v;
    naive /= static_cast<double>(n_members);
    worst_mean = std::max(worst_mean, (h0 - naive).cwiseAbs().maxCoeff());

    Supernode shuffled = sn;
    rng.shuffle(shuffled.members);
    const Vector h0_perm = supernode_init(shuffled, lookup);
    worst_perm = std::max(worst_perm, (h0 - h0_perm).cwiseAbs().maxCoeff());
  }
  const bool ok = worst_mean <= 1e-12 && worst_perm <= 1e-12;
  report(3, "supernode initialization equals the naive mean", ok,
         fmt("200 supernodes, mean |delta| max %.3e, permutation |delta| max "
             "%.3e (tol 1e-12)",
             worst_mean, worst_perm));
}

// ---------------------------------------------------------------------------
// 4. Gradient checks for the classifier loss and the full selection loss.
// ---------------------------------------------------------------------------
void criterion_4() {
  const auto start = Clock::now();
  double worst_rcnn = 0.0;
  double worst_selection = 0.0;

  for (std::uint64_t seed = 41; seed < 46; ++seed) {
    Rng rng(seed);

    {  // classifier loss
      const WordVectorTable table(6);
      RcnnConfig cfg{6, 4, 5};
      RcnnParams params = RcnnParams::create(
          {"who", "wrote", "the", "movie", "<ent>"}, 3, table, cfg, rng);
      const std::vector<std::string> tokens = {"who", "wrote", "the", "movie",
                                               "<ent>"};
      const int gold = static_cast<int>(seed % 3);

      auto loss = [&](const Vector& flat) {
        RcnnParams p = params;
        p.from_flat(flat);
        return cross_entropy(rcnn_forward(p, tokens), gold);
      };
      RcnnCache cache;
      const Vector probs = rcnn_forward(params, tokens, &cache);
      Vector d_logits = probs;
      d_logits(gold) -= 1.0;
      const auto grads = rcnn_backward(params, cache, d_logits);
      const auto check = grad_check(loss, params.to_flat(), grads.to_flat());
      worst_rcnn = std::max(worst_rcnn, check.max_rel_err);
    }

    {  // selection loss through LSTM, projection, softmax
      const int dim = 5, hidden = 4;
      SelectorParams params = SelectorParams::create(dim, hidden, rng);
      const WordVectorTable table(dim);
      const std::vector<std::string> tokens = {"who", "wrote", "<ent>"};
      Matrix H(4, dim);
      for (int r = 0; r < 4; ++r) H.row(r) = random_vector(rng, dim).transpose();
      const int gold = static_cast<int>(seed % 4);

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
      const auto check = grad_check(loss, params.to_flat(), analytic);
      worst_selection = std::max(worst_selection, check.max_rel_err);
    }
  }

  const double elapsed = seconds_since(start);
  const bool ok =
      worst_rcnn < 1e-4 && worst_selection < 1e-4 && elapsed < 60.0;
  report(4, "finite-difference gradient checks", ok,
         fmt("5 seeds; classifier rel err %.3e, selection rel err %.3e (tol "
             "1e-4), %.2fs (limit 60s)",
             worst_rcnn, worst_selection, elapsed));
}

// ---------------------------------------------------------------------------
// 5. Softmax and argmax properties.
// ---------------------------------------------------------------------------
void criterion_5() {
  Rng rng(5005);
  double worst_sum = 0.0;
  for (int round = 0; round < 1000; ++round) {
    const int n = rng.uniform_int(1, 24);
    const Vector p = softmax(random_vector(rng, n, -30.0, 30.0));
    worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
  }

  bool shift_ok = true;
  bool perm_ok = true;
  for (int round = 0; round < 200; ++round) {
    const int n = rng.uniform_int(2, 10);
    const int d = rng.uniform_int(2, 6);
    Matrix H(n, d);
    for (int r = 0; r < n; ++r) H.row(r) = random_vector(rng, d).transpose();
    const Vector q = random_vector(rng, d);

    SummaryGraph summary;
    for (int i = 0; i < n; ++i) summary.supernodes.push_back({i, {i}, 0, {}});
    const auto base = select_answer(H, q, summary);

    // Constant shift via an appended all-ones column.
    Matrix H_shift(n, d + 1);
    H_shift << H, Matrix::Ones(n, 1);
    Vector q_shift(d + 1);
    q_shift << q, rng.uniform(-20, 20);
    if (select_answer(H_shift, q_shift, summary).supernode_id !=
        base.supernode_id) {
      shift_ok = false;
    }

    // Permutation: same member set wins regardless of row order.
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    Matrix H_perm(n, d);
    SummaryGraph perm_summary;
    for (int i = 0; i < n; ++i) {
      const int source = perm[static_cast<std::size_t>(i)];
      H_perm.row(i) = H.row(source);
      Supernode sn = summary.supernodes[static_cast<std::size_t>(source)];
      sn.id = i;
      perm_summary.supernodes.push_back(std::move(sn));
    }
    if (select_answer(H_perm, q, perm_summary).members != base.members) {
      perm_ok = false;
    }
  }

  const bool ok = worst_sum <= 1e-12 && shift_ok && perm_ok;
  report(5, "softmax/argmax properties", ok,
         fmt("1000 softmax sums, max |sum-1| = %.3e (tol 1e-12); shift "
             "invariance %s; permutation invariance %s",
             worst_sum, shift_ok ? "exact" : "VIOLATED",
             perm_ok ? "holds" : "VIOLATED"));
}

// ---------------------------------------------------------------------------
// 6/7/9. Synthetic end-to-end benchmark, summarization ablation, determinism.
// ---------------------------------------------------------------------------
struct BenchmarkArtifacts {
  fs::path dir;
  bool trained = false;
  double train_seconds = 0.0;
};

std::vector<std::string> benchmark_generate_args(const fs::path& dir) {
  return {"generate", "--seed", "7", "--out", dir.string()};
}

BenchmarkArtifacts run_benchmark(const fs::path& dir) {
  BenchmarkArtifacts artifacts;
  artifacts.dir = dir;
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto start = Clock::now();
  if (run(benchmark_generate_args(dir)) != 0) return artifacts;
  if (run({"train", "--data", dir.string(), "--model",
           (dir / "model.json").string(), "--report",
           (dir / "train_report.json").string(), "--seed", "7"}) != 0) {
    return artifacts;
  }
  if (run({"eval", "--data", dir.string(), "--model",
           (dir / "model.json").string(), "--split", "test", "--report",
           (dir / "eval_report.json").string()}) != 0) {
    return artifacts;
  }
  artifacts.train_seconds = seconds_since(start);
  artifacts.trained = true;
  return artifacts;
}

void criterion_6(const BenchmarkArtifacts& artifacts) {
  if (!artifacts.trained) {
    report(6, "synthetic end-to-end benchmark", false, "pipeline run failed");
    return;
  }
  const json generate_report =
      json::parse(slurp(artifacts.dir / "generate_report.json"));
  const json eval_report = json::parse(slurp(artifacts.dir / "eval_report.json"));

  const double multi_fraction = generate_report.at("multi_answer_fraction");
  const int n_entities = generate_report.at("n_entities");
  const int n_relations = generate_report.at("n_relations");
  const double hits = eval_report.at("hits_at_1");
  const double rcnn_acc = eval_report.value("rcnn_relation_accuracy", -1.0);

  const bool ok = multi_fraction >= 0.60 && n_relations == 5 && hits >= 0.90 &&
                  rcnn_acc >= 0.95 && artifacts.train_seconds < 300.0;
  report(6, "synthetic end-to-end benchmark", ok,
         fmt("%d entities, %d relations, multi-answer %.3f (>=0.60); hits@1 "
             "%.3f (>=0.90); relation accuracy %.3f (>=0.95); generate+train+"
             "eval %.1fs (limit 300s)",
             n_entities, n_relations, multi_fraction, hits, rcnn_acc,
             artifacts.train_seconds));
}

void criterion_7(const BenchmarkArtifacts& artifacts) {
  if (!artifacts.trained) {
    report(7, "summarization ablation", false, "pipeline run failed");
    return;
  }
  const fs::path gs_path = artifacts.dir / "eval_multi_gs.json";
  const fs::path nogs_path = artifacts.dir / "eval_multi_nogs.json";
  if (run({"eval", "--data", artifacts.dir.string(), "--model",
           (artifacts.dir / "model.json").string(), "--split", "test",
           "--multi-answer-only", "--report", gs_path.string()}) != 0 ||
      run({"eval", "--data", artifacts.dir.string(), "--model",
           (artifacts.dir / "model.json").string(), "--split", "test",
           "--multi-answer-only", "--no-summarization", "--report",
           nogs_path.string()}) != 0) {
    report(7, "summarization ablation", false, "eval run failed");
    return;
  }
  const json gs = json::parse(slurp(gs_path));
  const json nogs = json::parse(slurp(nogs_path));
  const double gs_recall = gs.at("recall");
  const double nogs_recall = nogs.at("recall");
  const double gs_hits = gs.at("hits_at_1");
  const double nogs_hits = nogs.at("hits_at_1");
  const double hits_gap = std::abs(gs_hits - nogs_hits);

  const bool ok = gs_recall >= 0.95 && nogs_recall <= 0.55 && hits_gap <= 0.05;
  report(7, "summarization ablation (multi-answer subset)", ok,
         fmt("GS recall %.3f (>=0.95), noGS recall %.3f (<=0.55); hits@1 %.3f "
             "vs %.3f, |gap| %.3f (<=0.05)",
             gs_recall, nogs_recall, gs_hits, nogs_hits, hits_gap));
}

void criterion_8() {
  int wins = 0;
  int ties_or_wins = 0;
  std::string per_seed;
  for (std::uint64_t seed = 101; seed <= 105; ++seed) {
    GeneratorConfig config;
    config.seed = seed;
    const auto data = generate_synthetic(config);
    const auto kg = KnowledgeGraph::load_triples(data.kg_text);
    const auto table = WordVectorTable::load(data.vectors_text);

    TrainOptions rcnn_options;
    rcnn_options.sgd.seed = seed;
    rcnn_options.rcnn.embed_dim = table.dimension();
    auto [rcnn_models, rcnn_report] =
        train_system(kg, table, data.train, data.dev, rcnn_options);

    TrainOptions uniform_options = rcnn_options;
    uniform_options.uniform_weights = true;
    auto [uniform_models, uniform_report] =
        train_system(kg, table, data.train, data.dev, uniform_options);

    ModeFlags rcnn_flags;
    ModeFlags uniform_flags;
    uniform_flags.uniform_weights = true;
    const double rcnn_hits =
        evaluate(kg, table, rcnn_models, data.test, rcnn_flags).hits_at_1;
    const double uniform_hits =
        evaluate(kg, table, uniform_models, data.test, uniform_flags).hits_at_1;

    if (rcnn_hits >= uniform_hits) ++ties_or_wins;
    if (rcnn_hits > uniform_hits) ++wins;
    per_seed += fmt(" s%llu: %.3f/%.3f", static_cast<unsigned long long>(seed),
                    rcnn_hits, uniform_hits);
  }
  const bool ok = ties_or_wins == 5 && wins >= 3;
  report(8, "relation-classifier ablation", ok,
         fmt("rcnn >= uniform on %d/5 seeds, strictly better on %d/5 "
             "(need 5 and >=3);%s",
             ties_or_wins, wins, per_seed.c_str()));
}

void criterion_9(const BenchmarkArtifacts& first) {
  if (!first.trained) {
    report(9, "seeded determinism", false, "pipeline run failed");
    return;
  }
  const fs::path dir = first.dir.parent_path() / "acceptance_repeat";
  const auto second = run_benchmark(dir);
  if (!second.trained) {
    report(9, "seeded determinism", false, "second pipeline run failed");
    return;
  }
  bool ok = true;
  std::string detail;
  for (const char* name :
       {"generate_report.json", "train_report.json", "eval_report.json"}) {
    const bool same = slurp(first.dir / name) == slurp(second.dir / name);
    if (!same) ok = false;
    detail += fmt(" %s=%s", name, same ? "identical" : "DIFFERS");
  }
  fs::remove_all(dir);
  report(9, "seeded determinism", ok, "byte comparison:" + detail);
}

}  // namespace

int main() {
  std::printf("GS-KGQA acceptance suite\n");

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();

  const fs::path work = fs::temp_directory_path() / "gskgqa_acceptance";
  const auto artifacts = run_benchmark(work);
  criterion_6(artifacts);
  criterion_7(artifacts);
  criterion_8();
  criterion_9(artifacts);
  fs::remove_all(work);

  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
