#include "kgqa/propagation.hpp"

#include "kgqa/errors.hpp"

namespace kgqa {

EmbeddingMatrix propagate(const SummaryGraph& summary,
                          const std::vector<Vector>& inits,
                          const std::function<Vector(EntityId)>& anchor_vec,
                          const RelationWeights& weights) {
  const std::size_t n = summary.supernodes.size();
  if (inits.size() != n) {
    throw ShapeError("propagate: one init vector per supernode required");
  }
  if (n == 0) return EmbeddingMatrix(0, 0);
  const Eigen::Index dim = inits[0].size();
  for (const Vector& h : inits) {
    if (h.size() != dim) throw ShapeError("propagate: mixed init dimensions");
  }

  std::vector<Vector> acc(inits);
  std::vector<int> degree(n, 0);
  for (const SummaryEdge& edge : summary.edges) {
    if (edge.supernode < 0 || static_cast<std::size_t>(edge.supernode) >= n) {
      throw ShapeError("propagate: edge references an unknown supernode");
    }
    const auto i = static_cast<std::size_t>(edge.supernode);
    const Vector h_anchor = anchor_vec(edge.anchor);
    if (h_anchor.size() != dim) {
      throw ShapeError("propagate: anchor vector dimension mismatch");
    }
    acc[i] += h_anchor * weights.at(edge.relation);
    ++degree[i];
  }

  EmbeddingMatrix out(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        (acc[i] / (1.0 + static_cast<double>(degree[i]))).transpose();
  }
  return out;
}

}  // namespace kgqa
