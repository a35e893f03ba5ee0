#pragma once

#include <string>
#include <vector>

#include "kgqa/kg.hpp"

namespace kgqa {

struct Mention {
  std::string surface;  // matched phrase, normalized form
  int begin = 0;        // token span [begin, end)
  int end = 0;
  EntityId entity = -1;
};

// Radius-1 question-related subgraph: every triple touches a question
// entity. Ids refer to the parent KnowledgeGraph.
struct Subgraph {
  std::vector<Triple> triples;
  std::vector<EntityId> question_entities;  // mention order, deduplicated
};

// Greedy longest-match, left-to-right, case-insensitive dictionary matching
// of entity names/aliases against token n-grams. Overlapping shorter matches
// are discarded. Throws NoEntityError when nothing matches.
std::vector<Mention> link_entities(const std::vector<std::string>& tokens,
                                   const KnowledgeGraph& kg);

// Question entities in mention order; repeated mentions of one entity
// collapse to a single occurrence.
std::vector<EntityId> question_entities(const std::vector<Mention>& mentions);

// Every mention span replaced by a single placeholder token.
std::vector<std::string> mask_mentions(const std::vector<std::string>& tokens,
                                       const std::vector<Mention>& mentions);

// All triples with a question entity as head or tail.
Subgraph extract_subgraph(const KnowledgeGraph& kg,
                          const std::vector<EntityId>& entities);

}  // namespace kgqa
