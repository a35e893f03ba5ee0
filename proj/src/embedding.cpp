#include "kgqa/embedding.hpp"

#include <fstream>
#include <sstream>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"
#include "kgqa/util.hpp"

namespace kgqa {

WordVectorTable::WordVectorTable(int dimension) : dim_(dimension) {
  if (dimension <= 0) throw ConfigError("word vector dimension must be > 0");
}

WordVectorTable WordVectorTable::load(const std::string& source) {
  std::istringstream in(source);
  std::string line;
  int dim = -1;
  std::size_t line_no = 0;

  std::unordered_map<std::string, Vector> vectors;
  std::vector<std::string> warnings;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw ParseError("word vector line " + std::to_string(line_no) +
                       ": non-numeric vector entry");
    }
    if (token.empty() || values.empty()) {
      throw ParseError("word vector line " + std::to_string(line_no) +
                       ": expected token followed by vector entries");
    }
    if (dim < 0) {
      dim = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != dim) {
      throw ParseError("word vector line " + std::to_string(line_no) +
                       ": expected " + std::to_string(dim) +
                       " entries, got " + std::to_string(values.size()));
    }

    Vector vec(dim);
    for (int i = 0; i < dim; ++i) vec(i) = values[static_cast<std::size_t>(i)];
    const std::string key = fold_case(token);
    if (!vectors.emplace(key, vec).second) {
      vectors[key] = std::move(vec);  // last wins
      warnings.push_back("duplicate token \"" + key + "\" on line " +
                         std::to_string(line_no) + "; keeping last");
    }
  }

  if (dim < 0) throw DataError("word vector source contains no rows");
  WordVectorTable table(dim);
  table.vectors_ = std::move(vectors);
  table.warnings_ = std::move(warnings);
  return table;
}

WordVectorTable WordVectorTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

const Vector* WordVectorTable::find(const std::string& token) const {
  const auto it = vectors_.find(fold_case(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

Vector WordVectorTable::vector_for_token(const std::string& token) const {
  if (const Vector* row = find(token)) return *row;
  return oov_vector(fold_case(token), dim_);
}

Vector oov_vector(const std::string& token, int dim) {
  Rng rng(fnv1a64(token));
  const double bound = 0.5 / static_cast<double>(dim);
  Vector vec(dim);
  for (int i = 0; i < dim; ++i) vec(i) = rng.uniform(-bound, bound);
  return vec;
}

Vector entity_vector(const std::string& name, const WordVectorTable& table) {
  if (name.empty()) throw InputError("empty entity name");
  auto tokens = tokenize(name);
  if (tokens.empty()) tokens.push_back(fold_case(name));

  Vector sum = Vector::Zero(table.dimension());
  for (const std::string& token : tokens) {
    sum += table.vector_for_token(token);
  }
  return sum / static_cast<double>(tokens.size());
}

Vector supernode_init(const Supernode& sn,
                      const std::function<Vector(EntityId)>& entity_vec) {
  Vector sum = entity_vec(sn.members.at(0));
  for (std::size_t i = 1; i < sn.members.size(); ++i) {
    sum += entity_vec(sn.members[i]);
  }
  return sum / static_cast<double>(sn.members.size());
}

}  // namespace kgqa
