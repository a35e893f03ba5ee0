#pragma once

#include <functional>
#include <vector>

#include "kgqa/rcnn.hpp"
#include "kgqa/summarize.hpp"

namespace kgqa {

// Row i is the final representation of supernode i.
using EmbeddingMatrix = Matrix;

// Single-layer, parameter-free, relation-weighted propagation:
//
//   h1_i = (h0_i + sum_r sum_{j in N_i^r} h0_j * w_r) / (1 + sum_r |N_i^r|)
//
// where the neighbors of a supernode are the anchor question entities on its
// summary-graph edges, contributing their entity vectors.
EmbeddingMatrix propagate(const SummaryGraph& summary,
                          const std::vector<Vector>& inits,
                          const std::function<Vector(EntityId)>& anchor_vec,
                          const RelationWeights& weights);

}  // namespace kgqa
