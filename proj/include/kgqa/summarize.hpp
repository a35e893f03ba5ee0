#pragma once

#include <string>
#include <vector>

#include "kgqa/kg.hpp"
#include "kgqa/linking.hpp"

namespace kgqa {

// A set of candidate answers grouped by the relation linking them to their
// anchor question entities. Members are sorted and never empty.
struct Supernode {
  int id = 0;
  std::vector<EntityId> members;
  RelationId relation = -1;
  std::vector<EntityId> anchors;  // sorted ascending
};

struct SummaryEdge {
  EntityId anchor;
  RelationId relation;
  int supernode;

  friend bool operator==(const SummaryEdge&, const SummaryEdge&) = default;
};

struct SummaryGraph {
  std::vector<Supernode> supernodes;  // index == id
  std::vector<EntityId> question_entities;
  std::vector<SummaryEdge> edges;
  std::vector<RelationId> relations;  // distinct relations, ascending
};

// Single question entity: one supernode per incident relation, holding all
// neighbors reached through it. A neighbor adjacent via two relations lands
// in both supernodes.
SummaryGraph summarize_single(const Subgraph& sub);

// Multiple question entities: per relation, the intersection of the
// entities' neighbor sets becomes one shared supernode anchored to all of
// them; each entity's leftover neighbors become a remainder supernode
// anchored to that entity alone.
SummaryGraph summarize_multi(const Subgraph& sub);

// Summarization bypass: every non-question node of the subgraph is its own
// singleton candidate.
SummaryGraph summarize_none(const Subgraph& sub);

// Dispatch on question-entity count.
SummaryGraph summarize(const Subgraph& sub);

struct SupernodeCheck {
  int supernode_id = 0;
  bool match = false;
  std::vector<EntityId> expected;
};

struct GroupingReport {
  std::vector<SupernodeCheck> checks;
  int mismatches = 0;

  bool pass() const { return mismatches == 0; }
};

// Re-derives every supernode's member set from direct adjacency queries
// against the KG and reports per-supernode match/mismatch.
GroupingReport verify_grouping(const SummaryGraph& summary,
                               const KnowledgeGraph& kg);

// One line per supernode: `[id] anchor(s) --relation--> {members}`.
std::string summary_to_text(const SummaryGraph& summary,
                            const KnowledgeGraph& kg);

}  // namespace kgqa
