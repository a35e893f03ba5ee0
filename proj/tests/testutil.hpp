#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgqa/kg.hpp"
#include "kgqa/linking.hpp"
#include "kgqa/util.hpp"

namespace kgqa::test {

// Three movies A, B, C and persons 1,4,5,6,7; 10 edges. C touches
// written_by(1,6) and directed_by(1,5), the written_by intersection over
// {A,B,C} is {1,6}, and B keeps the leftover writers {4,7}.
inline const char* kThreeMovieTriples =
    "A\twritten_by\t1\n"
    "A\twritten_by\t6\n"
    "B\twritten_by\t1\n"
    "B\twritten_by\t4\n"
    "B\twritten_by\t6\n"
    "B\twritten_by\t7\n"
    "C\twritten_by\t1\n"
    "C\twritten_by\t6\n"
    "C\tdirected_by\t1\n"
    "C\tdirected_by\t5\n";

inline KnowledgeGraph three_movie_kg() {
  return KnowledgeGraph::load_triples(kThreeMovieTriples);
}

// Random triple file over e0..e{n-1} and r0..r{m-1}; duplicates are fine,
// the loader collapses them.
inline std::string random_triple_text(Rng& rng, int n_entities,
                                      int n_relations, int n_triples) {
  std::string text;
  for (int i = 0; i < n_triples; ++i) {
    const int h = rng.uniform_int(0, n_entities - 1);
    const int r = rng.uniform_int(0, n_relations - 1);
    int t = rng.uniform_int(0, n_entities - 1);
    if (t == h) t = (t + 1) % n_entities;
    text += "e" + std::to_string(h) + "\tr" + std::to_string(r) + "\te" +
            std::to_string(t) + "\n";
  }
  return text;
}

// Undirected relation->neighbor sets straight from the triple list.
inline std::map<RelationId, std::set<EntityId>> scan_neighbors(
    const std::vector<Triple>& triples, EntityId entity) {
  std::map<RelationId, std::set<EntityId>> out;
  for (const Triple& t : triples) {
    if (t.head == entity) out[t.relation].insert(t.tail);
    if (t.tail == entity) out[t.relation].insert(t.head);
  }
  return out;
}

}  // namespace kgqa::test
