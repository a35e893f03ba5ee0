#include "kgqa/summarize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "kgqa/errors.hpp"

namespace kgqa {

namespace {

using NeighborSets = std::map<RelationId, std::set<EntityId>>;

// Relation -> neighbor set for one entity, ignoring edge direction and
// excluding the question entities themselves (candidates are answers).
NeighborSets subgraph_neighbors(const Subgraph& sub, EntityId entity,
                                const std::unordered_set<EntityId>& excluded) {
  NeighborSets sets;
  for (const Triple& t : sub.triples) {
    EntityId other;
    if (t.head == entity) {
      other = t.tail;
    } else if (t.tail == entity) {
      other = t.head;
    } else {
      continue;
    }
    if (excluded.count(other)) continue;
    sets[t.relation].insert(other);
  }
  return sets;
}

std::unordered_set<EntityId> as_set(const std::vector<EntityId>& ids) {
  return {ids.begin(), ids.end()};
}

Supernode make_supernode(int id, const std::set<EntityId>& members,
                         RelationId relation, std::vector<EntityId> anchors) {
  std::sort(anchors.begin(), anchors.end());
  return Supernode{id,
                   std::vector<EntityId>(members.begin(), members.end()),
                   relation, std::move(anchors)};
}

void add_edges(SummaryGraph& summary, const Supernode& sn) {
  for (EntityId anchor : sn.anchors) {
    summary.edges.push_back({anchor, sn.relation, sn.id});
  }
}

}  // namespace

SummaryGraph summarize_single(const Subgraph& sub) {
  if (sub.question_entities.size() != 1) {
    throw InputError("summarize_single expects exactly one question entity");
  }
  const EntityId center = sub.question_entities[0];
  const auto excluded = as_set(sub.question_entities);
  const NeighborSets grouped = subgraph_neighbors(sub, center, excluded);

  SummaryGraph summary;
  summary.question_entities = sub.question_entities;
  for (const auto& [relation, members] : grouped) {
    if (members.empty()) continue;
    Supernode sn = make_supernode(static_cast<int>(summary.supernodes.size()),
                                  members, relation, {center});
    add_edges(summary, sn);
    summary.relations.push_back(relation);
    summary.supernodes.push_back(std::move(sn));
  }

  if (summary.supernodes.empty()) {
    throw EmptySummaryError("question entity has no neighbors to group");
  }
  return summary;
}

SummaryGraph summarize_multi(const Subgraph& sub) {
  if (sub.question_entities.size() < 2) {
    throw InputError("summarize_multi expects at least two question entities");
  }
  const auto excluded = as_set(sub.question_entities);

  std::vector<NeighborSets> per_entity;
  per_entity.reserve(sub.question_entities.size());
  std::set<RelationId> relations;
  for (EntityId e : sub.question_entities) {
    per_entity.push_back(subgraph_neighbors(sub, e, excluded));
    for (const auto& [relation, members] : per_entity.back()) {
      if (!members.empty()) relations.insert(relation);
    }
  }

  SummaryGraph summary;
  summary.question_entities = sub.question_entities;
  for (RelationId relation : relations) {
    // Intersection over all question entities; empty neighborhoods make it
    // empty, leaving only remainder supernodes for that relation.
    std::set<EntityId> shared;
    bool first = true;
    for (const auto& sets : per_entity) {
      const auto it = sets.find(relation);
      const std::set<EntityId> empty;
      const std::set<EntityId>& mine = it == sets.end() ? empty : it->second;
      if (first) {
        shared = mine;
        first = false;
      } else {
        std::set<EntityId> next;
        std::set_intersection(shared.begin(), shared.end(), mine.begin(),
                              mine.end(), std::inserter(next, next.begin()));
        shared = std::move(next);
      }
    }

    if (!shared.empty()) {
      Supernode sn =
          make_supernode(static_cast<int>(summary.supernodes.size()), shared,
                         relation, sub.question_entities);
      add_edges(summary, sn);
      summary.supernodes.push_back(std::move(sn));
    }

    // Remainders ordered by anchor id for stable supernode indexing.
    std::vector<std::pair<EntityId, const std::set<EntityId>*>> anchored;
    for (std::size_t k = 0; k < per_entity.size(); ++k) {
      const auto it = per_entity[k].find(relation);
      if (it == per_entity[k].end()) continue;
      anchored.emplace_back(sub.question_entities[k], &it->second);
    }
    std::sort(anchored.begin(), anchored.end());
    for (const auto& [anchor, mine] : anchored) {
      std::set<EntityId> rest;
      std::set_difference(mine->begin(), mine->end(), shared.begin(),
                          shared.end(), std::inserter(rest, rest.begin()));
      if (rest.empty()) continue;
      Supernode sn = make_supernode(
          static_cast<int>(summary.supernodes.size()), rest, relation, {anchor});
      add_edges(summary, sn);
      summary.supernodes.push_back(std::move(sn));
    }

    summary.relations.push_back(relation);
  }

  if (summary.supernodes.empty()) {
    throw EmptySummaryError("question entities have no neighbors to group");
  }
  return summary;
}

SummaryGraph summarize_none(const Subgraph& sub) {
  if (sub.question_entities.empty()) {
    throw InputError("no question entities");
  }
  const auto excluded = as_set(sub.question_entities);

  // Candidate nodes in ascending id order; one singleton supernode each.
  std::set<EntityId> candidates;
  for (const Triple& t : sub.triples) {
    if (!excluded.count(t.head)) candidates.insert(t.head);
    if (!excluded.count(t.tail)) candidates.insert(t.tail);
  }
  if (candidates.empty()) {
    throw EmptySummaryError("no candidate nodes in subgraph");
  }

  SummaryGraph summary;
  summary.question_entities = sub.question_entities;
  std::map<EntityId, int> index;
  for (EntityId node : candidates) {
    const int id = static_cast<int>(summary.supernodes.size());
    index[node] = id;
    summary.supernodes.push_back(Supernode{id, {node}, -1, {}});
  }

  // (anchor, relation, node) edges, deduplicated across directions.
  std::set<std::tuple<int, RelationId, EntityId>> edge_keys;
  for (const Triple& t : sub.triples) {
    EntityId anchor, node;
    if (excluded.count(t.head) && !excluded.count(t.tail)) {
      anchor = t.head;
      node = t.tail;
    } else if (excluded.count(t.tail) && !excluded.count(t.head)) {
      anchor = t.tail;
      node = t.head;
    } else {
      continue;
    }
    edge_keys.emplace(index[node], t.relation, anchor);
  }

  std::set<RelationId> relations;
  for (const auto& [id, relation, anchor] : edge_keys) {
    summary.edges.push_back({anchor, relation, id});
    relations.insert(relation);
    Supernode& sn = summary.supernodes[static_cast<std::size_t>(id)];
    if (sn.relation < 0) sn.relation = relation;  // smallest incident label
    if (std::find(sn.anchors.begin(), sn.anchors.end(), anchor) ==
        sn.anchors.end()) {
      sn.anchors.push_back(anchor);
    }
  }
  for (Supernode& sn : summary.supernodes) {
    std::sort(sn.anchors.begin(), sn.anchors.end());
  }
  summary.relations.assign(relations.begin(), relations.end());
  return summary;
}

SummaryGraph summarize(const Subgraph& sub) {
  return sub.question_entities.size() == 1 ? summarize_single(sub)
                                           : summarize_multi(sub);
}

GroupingReport verify_grouping(const SummaryGraph& summary,
                               const KnowledgeGraph& kg) {
  GroupingReport report;
  const auto excluded = as_set(summary.question_entities);
  const bool multi = summary.question_entities.size() > 1;

  // Direct adjacency queries against the KG, independent of the
  // subgraph-based grouping path.
  auto kg_neighbors = [&](EntityId entity, RelationId relation) {
    std::set<EntityId> out;
    for (const NeighborEdge& edge : kg.neighbors(entity)) {
      if (edge.relation != relation) continue;
      if (excluded.count(edge.neighbor)) continue;
      out.insert(edge.neighbor);
    }
    return out;
  };

  for (const Supernode& sn : summary.supernodes) {
    std::set<EntityId> expected;
    if (!multi) {
      expected = kg_neighbors(summary.question_entities[0], sn.relation);
    } else {
      std::set<EntityId> shared;
      bool first = true;
      for (EntityId e : summary.question_entities) {
        const auto mine = kg_neighbors(e, sn.relation);
        if (first) {
          shared = mine;
          first = false;
        } else {
          std::set<EntityId> next;
          std::set_intersection(shared.begin(), shared.end(), mine.begin(),
                                mine.end(), std::inserter(next, next.begin()));
          shared = std::move(next);
        }
      }
      const bool is_shared =
          sn.anchors.size() == summary.question_entities.size();
      if (is_shared) {
        expected = shared;
      } else {
        const auto mine = kg_neighbors(sn.anchors.at(0), sn.relation);
        std::set_difference(mine.begin(), mine.end(), shared.begin(),
                            shared.end(),
                            std::inserter(expected, expected.begin()));
      }
    }

    SupernodeCheck check;
    check.supernode_id = sn.id;
    check.expected.assign(expected.begin(), expected.end());
    check.match = check.expected == sn.members;
    if (!check.match) ++report.mismatches;
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::string summary_to_text(const SummaryGraph& summary,
                            const KnowledgeGraph& kg) {
  std::string out;
  for (const Supernode& sn : summary.supernodes) {
    out += "[" + std::to_string(sn.id) + "] ";
    for (std::size_t i = 0; i < sn.anchors.size(); ++i) {
      if (i > 0) out += ", ";
      out += kg.entity_name(sn.anchors[i]);
    }
    out += " --" + kg.relation_name(sn.relation) + "--> {";
    for (std::size_t i = 0; i < sn.members.size(); ++i) {
      if (i > 0) out += ", ";
      out += kg.entity_name(sn.members[i]);
    }
    out += "}\n";
  }
  return out;
}

}  // namespace kgqa
