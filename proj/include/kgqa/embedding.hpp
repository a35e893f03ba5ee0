#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgqa/summarize.hpp"

namespace kgqa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// token -> d-dimensional vector map, loaded from the common text layout
// `token v1 v2 ... vd`. Tokens are lowercase-normalized. Unknown tokens get
// a deterministic hash-seeded fallback so distinct strings stay
// distinguishable.
class WordVectorTable {
 public:
  explicit WordVectorTable(int dimension);

  static WordVectorTable load(const std::string& source);
  static WordVectorTable load_file(const std::string& path);

  int dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  // Duplicate-token notes collected during load (last row wins).
  const std::vector<std::string>& warnings() const { return warnings_; }

  const Vector* find(const std::string& token) const;

  // Table row, or the OOV fallback when the token is unknown.
  Vector vector_for_token(const std::string& token) const;

 private:
  int dim_;
  std::unordered_map<std::string, Vector> vectors_;
  std::vector<std::string> warnings_;
};

// Pure function of (token, dim): entries uniform in [-0.5/d, 0.5/d], seeded
// by a stable hash of the token.
Vector oov_vector(const std::string& token, int dim);

// Mean of the name's token vectors.
Vector entity_vector(const std::string& name, const WordVectorTable& table);

// Supernode initialization: arithmetic mean of member entity vectors.
Vector supernode_init(const Supernode& sn,
                      const std::function<Vector(EntityId)>& entity_vec);

}  // namespace kgqa
