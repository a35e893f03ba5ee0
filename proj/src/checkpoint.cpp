#include "kgqa/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "kgqa/errors.hpp"

namespace kgqa {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  out["data"] = std::move(data);
  return out;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ParseError("checkpoint matrix payload size mismatch");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  return m;
}

json vector_to_json(const Vector& v) {
  std::vector<double> data(v.data(), v.data() + v.size());
  return json(data);
}

Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = data[i];
  return v;
}

json lstm_to_json(const LstmParams& p) {
  json out;
  out["input_dim"] = p.input_dim;
  out["hidden_dim"] = p.hidden_dim;
  out["Wi"] = matrix_to_json(p.Wi);
  out["Wf"] = matrix_to_json(p.Wf);
  out["Wo"] = matrix_to_json(p.Wo);
  out["Wg"] = matrix_to_json(p.Wg);
  out["Ui"] = matrix_to_json(p.Ui);
  out["Uf"] = matrix_to_json(p.Uf);
  out["Uo"] = matrix_to_json(p.Uo);
  out["Ug"] = matrix_to_json(p.Ug);
  out["bi"] = vector_to_json(p.bi);
  out["bf"] = vector_to_json(p.bf);
  out["bo"] = vector_to_json(p.bo);
  out["bg"] = vector_to_json(p.bg);
  return out;
}

LstmParams lstm_from_json(const json& j) {
  LstmParams p;
  p.input_dim = j.at("input_dim").get<int>();
  p.hidden_dim = j.at("hidden_dim").get<int>();
  p.Wi = matrix_from_json(j.at("Wi"));
  p.Wf = matrix_from_json(j.at("Wf"));
  p.Wo = matrix_from_json(j.at("Wo"));
  p.Wg = matrix_from_json(j.at("Wg"));
  p.Ui = matrix_from_json(j.at("Ui"));
  p.Uf = matrix_from_json(j.at("Uf"));
  p.Uo = matrix_from_json(j.at("Uo"));
  p.Ug = matrix_from_json(j.at("Ug"));
  p.bi = vector_from_json(j.at("bi"));
  p.bf = vector_from_json(j.at("bf"));
  p.bo = vector_from_json(j.at("bo"));
  p.bg = vector_from_json(j.at("bg"));
  return p;
}

json rcnn_to_json(const RcnnParams& p) {
  json out;
  out["embed_dim"] = p.cfg.embed_dim;
  out["context_dim"] = p.cfg.context_dim;
  out["hidden_dim"] = p.cfg.hidden_dim;
  out["n_relations"] = p.n_relations;
  out["vocab"] = p.vocab;
  out["E"] = matrix_to_json(p.E);
  out["Wl"] = matrix_to_json(p.Wl);
  out["Wr"] = matrix_to_json(p.Wr);
  out["Wsl"] = matrix_to_json(p.Wsl);
  out["Wsr"] = matrix_to_json(p.Wsr);
  out["cl0"] = vector_to_json(p.cl0);
  out["cr0"] = vector_to_json(p.cr0);
  out["W2"] = matrix_to_json(p.W2);
  out["b2"] = vector_to_json(p.b2);
  out["Wout"] = matrix_to_json(p.Wout);
  out["bout"] = vector_to_json(p.bout);
  return out;
}

RcnnParams rcnn_from_json(const json& j) {
  RcnnParams p;
  p.cfg.embed_dim = j.at("embed_dim").get<int>();
  p.cfg.context_dim = j.at("context_dim").get<int>();
  p.cfg.hidden_dim = j.at("hidden_dim").get<int>();
  p.n_relations = j.at("n_relations").get<int>();
  p.vocab = j.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < p.vocab.size(); ++i) {
    p.vocab_index.emplace(p.vocab[i], static_cast<int>(i));
  }
  p.E = matrix_from_json(j.at("E"));
  p.Wl = matrix_from_json(j.at("Wl"));
  p.Wr = matrix_from_json(j.at("Wr"));
  p.Wsl = matrix_from_json(j.at("Wsl"));
  p.Wsr = matrix_from_json(j.at("Wsr"));
  p.cl0 = vector_from_json(j.at("cl0"));
  p.cr0 = vector_from_json(j.at("cr0"));
  p.W2 = matrix_from_json(j.at("W2"));
  p.b2 = vector_from_json(j.at("b2"));
  p.Wout = matrix_from_json(j.at("Wout"));
  p.bout = vector_from_json(j.at("bout"));
  return p;
}

}  // namespace

std::string models_to_json(const Models& models) {
  json out;
  out["format"] = "gs-kgqa-model";
  out["version"] = 1;
  out["embed_dim"] = models.embed_dim;
  out["lstm_hidden"] = models.lstm_hidden;
  out["weight_mode"] = models.weight_mode;
  out["seed"] = models.seed;
  out["relations"] = models.relation_names;
  out["selector"] = {{"lstm", lstm_to_json(models.selector.lstm)},
                     {"proj", matrix_to_json(models.selector.proj)}};
  if (models.has_rcnn) out["rcnn"] = rcnn_to_json(models.rcnn);
  return out.dump(2) + "\n";
}

Models models_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "gs-kgqa-model") {
    throw ParseError("not a model checkpoint");
  }

  Models models;
  models.embed_dim = j.at("embed_dim").get<int>();
  models.lstm_hidden = j.at("lstm_hidden").get<int>();
  models.weight_mode = j.at("weight_mode").get<std::string>();
  models.seed = j.at("seed").get<std::uint64_t>();
  models.relation_names = j.at("relations").get<std::vector<std::string>>();
  models.selector.lstm = lstm_from_json(j.at("selector").at("lstm"));
  models.selector.proj = matrix_from_json(j.at("selector").at("proj"));
  models.has_rcnn = j.contains("rcnn");
  if (models.has_rcnn) models.rcnn = rcnn_from_json(j.at("rcnn"));
  return models;
}

void save_models(const Models& models, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << models_to_json(models);
}

Models load_models(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return models_from_json(buf.str());
}

}  // namespace kgqa
