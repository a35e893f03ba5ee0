#include "kgqa/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "kgqa/checkpoint.hpp"
#include "kgqa/dataset.hpp"
#include "kgqa/embedding.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/generator.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/pipeline.hpp"
#include "kgqa/summarize.hpp"
#include "kgqa/text.hpp"
#include "kgqa/training.hpp"

namespace kgqa {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << content;
}

void write_json(const fs::path& path, const json& payload) {
  write_file(path, payload.dump(2) + "\n");
}

KnowledgeGraph load_kg(const std::string& triples_path,
                       const std::string& aliases_path) {
  KnowledgeGraph kg = KnowledgeGraph::load_triples_file(triples_path);
  if (!aliases_path.empty()) kg.load_aliases_file(aliases_path);
  return kg;
}

json mode_json(const ModeFlags& flags) {
  return {{"summarization", flags.summarization},
          {"relation_weights", flags.uniform_weights ? "uniform" : "rcnn"}};
}

struct GenerateArgs {
  GeneratorConfig config;
  std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& args) {
  const SyntheticDataset data = generate_synthetic(args.config);
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_file(out / "kg.tsv", data.kg_text);
  write_file(out / "vectors.txt", data.vectors_text);
  write_file(out / "qa_train.jsonl", qa_to_jsonl(data.train));
  write_file(out / "qa_dev.jsonl", qa_to_jsonl(data.dev));
  write_file(out / "qa_test.jsonl", qa_to_jsonl(data.test));

  json report;
  report["command"] = "generate";
  report["seed"] = args.config.seed;
  report["config"] = {{"movies", args.config.movies},
                      {"persons", args.config.persons},
                      {"genres", args.config.genres},
                      {"years", args.config.years},
                      {"single_questions", args.config.single_questions},
                      {"two_entity_questions", args.config.two_entity_questions},
                      {"embed_dim", args.config.embed_dim}};
  report["n_questions"] = data.n_questions;
  report["n_train"] = data.train.size();
  report["n_dev"] = data.dev.size();
  report["n_test"] = data.test.size();
  report["n_entities"] = data.n_entities;
  report["n_relations"] = data.n_relations;
  report["n_triples"] = data.n_triples;
  report["multi_answer_fraction"] = data.multi_answer_fraction;
  write_json(out / "generate_report.json", report);

  std::cout << "generated " << data.n_questions << " questions over "
            << data.n_triples << " triples (multi-answer fraction "
            << data.multi_answer_fraction << ") in " << args.out_dir << "\n";
  return 0;
}

struct BuildKgArgs {
  std::string triples;
  std::string aliases;
  std::string normalized_out;
  std::string report_out;
};

int cmd_build_kg(const BuildKgArgs& args) {
  const KnowledgeGraph kg = load_kg(args.triples, args.aliases);
  std::cout << "entities: " << kg.entity_count()
            << "\nrelations: " << kg.relation_count()
            << "\ntriples: " << kg.triples().size() << "\n";
  if (!args.normalized_out.empty()) {
    write_file(args.normalized_out, kg.serialize_triples());
  }
  if (!args.report_out.empty()) {
    json report;
    report["command"] = "build-kg";
    report["n_entities"] = kg.entity_count();
    report["n_relations"] = kg.relation_count();
    report["n_triples"] = kg.triples().size();
    write_json(args.report_out, report);
  }
  return 0;
}

struct TrainArgs {
  std::string data_dir;
  std::string model_out = "model.json";
  std::string report_out;
  TrainOptions options;
};

int cmd_train(const TrainArgs& args) {
  const fs::path dir(args.data_dir);
  const KnowledgeGraph kg = load_kg((dir / "kg.tsv").string(), "");
  const WordVectorTable table =
      WordVectorTable::load_file((dir / "vectors.txt").string());
  const auto train = load_qa_jsonl_file((dir / "qa_train.jsonl").string());
  const auto dev = load_qa_jsonl_file((dir / "qa_dev.jsonl").string());

  TrainOptions options = args.options;
  options.rcnn.embed_dim = table.dimension();
  auto [models, report] = train_system(kg, table, train, dev, options);
  save_models(models, args.model_out);

  json out;
  out["command"] = "train";
  out["seed"] = options.sgd.seed;
  out["mode"] = models.weight_mode;
  out["config"] = {{"learning_rate", options.sgd.learning_rate},
                   {"epochs", options.sgd.epochs},
                   {"batch_size", options.sgd.batch_size},
                   {"lstm_hidden", options.lstm_hidden},
                   {"embed_dim", options.rcnn.embed_dim},
                   {"context_dim", options.rcnn.context_dim},
                   {"rcnn_hidden", options.rcnn.hidden_dim}};
  out["n_train"] = report.n_train;
  out["n_dev"] = report.n_dev;
  out["skipped"] = report.skipped;
  out["rcnn_losses"] = report.rcnn_losses;
  out["rcnn_best_dev_accuracy"] = report.rcnn_best_dev_accuracy;
  out["rcnn_best_epoch"] = report.rcnn_best_epoch;
  out["selector_losses"] = report.selector_losses;
  out["selector_best_dev_hits"] = report.selector_best_dev_hits;
  out["selector_best_epoch"] = report.selector_best_epoch;
  if (!args.report_out.empty()) write_json(args.report_out, out);

  std::cout << "trained " << models.weight_mode << "-mode model on "
            << report.n_train << " examples (skipped " << report.skipped
            << "); dev hits@1 " << report.selector_best_dev_hits << "\n";
  return 0;
}

struct EvalArgs {
  std::string data_dir;
  std::string model_path = "model.json";
  std::string split = "test";
  std::string questions_path;  // overrides the split file
  std::string format = "jsonl";
  std::string report_out;
  bool multi_answer_only = false;
  ModeFlags flags;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_eval(const EvalArgs& args) {
  const fs::path dir(args.data_dir);
  const KnowledgeGraph kg = load_kg((dir / "kg.tsv").string(), "");
  const WordVectorTable table =
      WordVectorTable::load_file((dir / "vectors.txt").string());
  const Models models = load_models(args.model_path);
  validate_models(models, kg);

  std::vector<QAExample> dataset;
  if (!args.questions_path.empty()) {
    if (args.format == "jsonl") {
      dataset = load_qa_jsonl(read_text(args.questions_path));
    } else if (args.format == "wikimovies") {
      dataset = load_wikimovies(read_text(args.questions_path));
    } else {
      throw ConfigError("unknown question format: " + args.format);
    }
  } else {
    if (args.split != "train" && args.split != "dev" && args.split != "test") {
      throw ConfigError("unknown split: " + args.split);
    }
    dataset =
        load_qa_jsonl_file((dir / ("qa_" + args.split + ".jsonl")).string());
  }

  const Metrics metrics =
      evaluate(kg, table, models, dataset, args.flags, args.multi_answer_only);

  json report;
  report["command"] = "eval";
  report["split"] = args.questions_path.empty() ? args.split : "custom";
  report["mode"] = mode_json(args.flags);
  report["seed"] = models.seed;
  report["config"] = {{"model_mode", models.weight_mode},
                      {"multi_answer_only", args.multi_answer_only},
                      {"embed_dim", models.embed_dim},
                      {"lstm_hidden", models.lstm_hidden}};
  report["n_questions"] = metrics.n_questions;
  report["n_errors"] = metrics.n_errors;
  report["hits_at_1"] = metrics.hits_at_1;
  report["recall"] = metrics.recall;
  report["recall_all_questions"] = metrics.recall_all;
  if (metrics.rcnn_accuracy >= 0) {
    report["rcnn_relation_accuracy"] = metrics.rcnn_accuracy;
  }
  json records = json::array();
  for (const QuestionRecord& r : metrics.records) {
    records.push_back({{"question", r.question},
                       {"hit", r.hit},
                       {"recall", r.recall},
                       {"predicted", r.predicted},
                       {"error", r.error}});
  }
  report["per_question"] = std::move(records);
  if (!args.report_out.empty()) write_json(args.report_out, report);

  std::cout << "hits@1 " << metrics.hits_at_1 << ", recall " << metrics.recall
            << " over " << metrics.n_questions << " questions";
  if (metrics.rcnn_accuracy >= 0) {
    std::cout << " (relation accuracy " << metrics.rcnn_accuracy << ")";
  }
  std::cout << "\n";
  return 0;
}

struct AskArgs {
  std::string kg_path;
  std::string aliases;
  std::string vectors;
  std::string model_path = "model.json";
  std::string question;
  std::string report_out;
  ModeFlags flags;
};

int cmd_ask(const AskArgs& args) {
  const KnowledgeGraph kg = load_kg(args.kg_path, args.aliases);
  const WordVectorTable table = WordVectorTable::load_file(args.vectors);
  const Models models = load_models(args.model_path);
  validate_models(models, kg);

  const AskResult result =
      answer_question(kg, table, models, args.question, args.flags);

  if (!args.report_out.empty()) {
    json report;
    report["command"] = "ask";
    report["question"] = args.question;
    report["mode"] = mode_json(args.flags);
    report["seed"] = models.seed;
    report["answers"] = result.answers;
    report["supernode"] = result.supernode_id;
    report["probability"] = result.probability;
    write_json(args.report_out, report);
  }

  if (args.flags.explain) {
    std::cout << "mentions:\n";
    for (const Mention& m : result.mentions) {
      std::cout << "  \"" << m.surface << "\" -> " << kg.entity_name(m.entity)
                << " [" << m.begin << ", " << m.end << ")\n";
    }
    std::cout << "summary graph:\n" << result.summary_text;
    std::cout << "relation weights:\n";
    for (std::size_t r = 0; r < result.relation_weights.size(); ++r) {
      std::cout << "  " << kg.relation_name(static_cast<RelationId>(r)) << " = "
                << result.relation_weights[r] << "\n";
    }
    std::cout << "top supernodes:\n";
    for (const ScoredSupernode& s : result.top_supernodes) {
      std::cout << "  [" << s.supernode_id << "] p=" << s.probability << " {";
      for (std::size_t i = 0; i < s.members.size(); ++i) {
        std::cout << (i ? ", " : "") << s.members[i];
      }
      std::cout << "}\n";
    }
  }

  std::cout << "answer (p=" << result.probability << "):";
  for (const auto& a : result.answers) std::cout << " " << a;
  std::cout << "\n";
  return 0;
}

struct SummarizeArgs {
  std::string kg_path;
  std::string aliases;
  std::string question;
  std::vector<std::string> entities;
};

int cmd_summarize(const SummarizeArgs& args) {
  const KnowledgeGraph kg = load_kg(args.kg_path, args.aliases);

  std::vector<EntityId> ids;
  if (!args.entities.empty()) {
    for (const auto& name : args.entities) ids.push_back(kg.resolve_entity(name));
  } else if (!args.question.empty()) {
    ids = question_entities(link_entities(tokenize(args.question), kg));
  } else {
    throw ConfigError("summarize needs --entities or --question");
  }

  const Subgraph sub = extract_subgraph(kg, ids);
  const SummaryGraph summary = summarize(sub);
  std::cout << summary_to_text(summary, kg);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Single-relation KGQA with graph summarization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  GenerateArgs gen;
  auto* generate = app.add_subcommand(
      "generate", "Generate a synthetic KG + QA benchmark");
  generate->add_option("--seed", gen.config.seed, "RNG seed");
  generate->add_option("--out", gen.out_dir, "output directory");
  generate->add_option("--movies", gen.config.movies, "number of movies");
  generate->add_option("--persons", gen.config.persons, "number of persons");
  generate->add_option("--genres", gen.config.genres, "number of genres");
  generate->add_option("--years", gen.config.years, "number of release years");
  generate->add_option("--single-questions", gen.config.single_questions,
                       "single-entity question count");
  generate->add_option("--two-entity-questions",
                       gen.config.two_entity_questions,
                       "two-entity question count");
  generate->add_option("--dim", gen.config.embed_dim, "word vector dimension");

  BuildKgArgs build;
  auto* build_kg = app.add_subcommand("build-kg", "Load and inspect a triple file");
  build_kg->add_option("--triples", build.triples, "triple file")->required();
  build_kg->add_option("--aliases", build.aliases, "alias file");
  build_kg->add_option("--out-normalized", build.normalized_out,
                       "write the canonical serialized triples here");
  build_kg->add_option("--report", build.report_out, "write a JSON report here");

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train", "Train the relation classifier and selector");
  train_cmd->add_option("--data", train.data_dir, "data directory (from generate)")
      ->required();
  train_cmd->add_option("--model", train.model_out, "model checkpoint path");
  train_cmd->add_option("--report", train.report_out, "training report path");
  train_cmd->add_option("--seed", train.options.sgd.seed, "RNG seed");
  train_cmd->add_option("--epochs", train.options.sgd.epochs, "max epochs");
  train_cmd->add_option("--lr", train.options.sgd.learning_rate, "learning rate");
  train_cmd->add_option("--batch-size", train.options.sgd.batch_size, "batch size");
  train_cmd->add_option("--hidden", train.options.lstm_hidden, "LSTM hidden size");
  train_cmd->add_flag("--uniform-relation-weights",
                      train.options.uniform_weights,
                      "train without the relation classifier (noRCNN)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model");
  eval_cmd->add_option("--data", eval_args.data_dir, "data directory")->required();
  eval_cmd->add_option("--model", eval_args.model_path, "model checkpoint path");
  eval_cmd->add_option("--split", eval_args.split, "train|dev|test");
  eval_cmd->add_option("--questions", eval_args.questions_path,
                       "evaluate this question file instead of a split");
  eval_cmd->add_option("--format", eval_args.format,
                       "question file format: jsonl|wikimovies");
  eval_cmd->add_option("--report", eval_args.report_out, "JSON report path");
  eval_cmd->add_flag("--multi-answer-only", eval_args.multi_answer_only,
                     "restrict to questions with at least two gold answers");
  bool eval_no_gs = false, eval_uniform = false;
  eval_cmd->add_flag("--no-summarization", eval_no_gs,
                     "noGS: singleton candidates");
  eval_cmd->add_flag("--uniform-relation-weights", eval_uniform,
                     "noRCNN: all relational weights 1");

  AskArgs ask;
  auto* ask_cmd = app.add_subcommand("ask", "Answer a single question");
  ask_cmd->add_option("--kg", ask.kg_path, "triple file")->required();
  ask_cmd->add_option("--aliases", ask.aliases, "alias file");
  ask_cmd->add_option("--vectors", ask.vectors, "word vector file")->required();
  ask_cmd->add_option("--model", ask.model_path, "model checkpoint path");
  ask_cmd->add_option("--report", ask.report_out, "JSON report path");
  ask_cmd->add_option("question", ask.question, "question text")->required();
  bool ask_no_gs = false, ask_uniform = false, ask_explain = false;
  ask_cmd->add_flag("--no-summarization", ask_no_gs, "noGS mode");
  ask_cmd->add_flag("--uniform-relation-weights", ask_uniform, "noRCNN mode");
  ask_cmd->add_flag("--explain", ask_explain,
                    "print mentions, summary graph, weights, top supernodes");

  SummarizeArgs summ;
  auto* summarize_cmd =
      app.add_subcommand("summarize", "Print the summary graph for entities");
  summarize_cmd->add_option("--kg", summ.kg_path, "triple file")->required();
  summarize_cmd->add_option("--aliases", summ.aliases, "alias file");
  summarize_cmd->add_option("--question", summ.question,
                            "link entities from this question");
  summarize_cmd->add_option("--entities", summ.entities,
                            "explicit entity names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (build_kg->parsed()) return cmd_build_kg(build);
    if (train_cmd->parsed()) return cmd_train(train);
    if (eval_cmd->parsed()) {
      eval_args.flags.summarization = !eval_no_gs;
      eval_args.flags.uniform_weights = eval_uniform;
      return cmd_eval(eval_args);
    }
    if (ask_cmd->parsed()) {
      ask.flags.summarization = !ask_no_gs;
      ask.flags.uniform_weights = ask_uniform;
      ask.flags.explain = ask_explain;
      return cmd_ask(ask);
    }
    if (summarize_cmd->parsed()) return cmd_summarize(summ);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace kgqa
