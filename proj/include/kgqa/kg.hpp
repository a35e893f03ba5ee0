#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgqa {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

enum class Direction : std::uint8_t { kOutgoing, kIncoming };

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct NeighborEdge {
  RelationId relation;
  EntityId neighbor;
  Direction direction;

  friend bool operator==(const NeighborEdge&, const NeighborEdge&) = default;
};

// In-process triple store. Dense ids are assigned in first-appearance order;
// the adjacency index keeps both edge directions so downstream code can treat
// the graph as undirected over labeled edges. Immutable once triples and
// aliases are loaded; safe for concurrent reads.
class KnowledgeGraph {
 public:
  // Triple file: one `head TAB relation TAB tail` per line, UTF-8,
  // '#'-prefixed lines are comments. Duplicate triples collapse to one.
  static KnowledgeGraph load_triples(const std::string& source);
  static KnowledgeGraph load_triples_file(const std::string& path);

  // Alias file: `canonical-name TAB alias` per line. Aliases extend the
  // lookup index only; they never create entities.
  void load_aliases(const std::string& source);
  void load_aliases_file(const std::string& path);

  std::size_t entity_count() const { return entity_names_.size(); }
  std::size_t relation_count() const { return relation_names_.size(); }
  const std::vector<Triple>& triples() const { return triples_; }

  const std::string& entity_name(EntityId id) const;
  const std::string& relation_name(RelationId id) const;

  // Case-insensitive lookup through canonical names and aliases.
  std::optional<EntityId> find_entity(const std::string& name) const;
  // Same, but throws NotFoundError listing nearest names by edit distance.
  EntityId resolve_entity(const std::string& name) const;

  std::optional<RelationId> find_relation(const std::string& name) const;
  RelationId resolve_relation(const std::string& name) const;

  // All directly linked nodes with the linking relation, sorted by
  // (relation, neighbor, direction). Unknown id throws NotFoundError.
  const std::vector<NeighborEdge>& neighbors(EntityId id) const;

  // Entity-linker support: lookup of a normalized token phrase, and the
  // longest name/alias length in tokens.
  std::optional<EntityId> find_phrase(const std::string& normalized) const;
  int max_name_tokens() const { return max_name_tokens_; }

  // Canonical tab-separated form; loading it reproduces an identical graph.
  std::string serialize_triples() const;

 private:
  KnowledgeGraph() = default;

  EntityId intern_entity(const std::string& name);
  RelationId intern_relation(const std::string& name);
  void register_surface(const std::string& surface, EntityId id);
  void build_adjacency();
  void check_entity(EntityId id) const;

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, EntityId> entity_by_exact_name_;
  std::unordered_map<std::string, RelationId> relation_by_exact_name_;

  // Normalized surface (canonical names + aliases) -> entity id; collisions
  // keep the smallest id so ties resolve deterministically.
  std::unordered_map<std::string, EntityId> entity_by_surface_;
  std::unordered_map<std::string, RelationId> relation_by_norm_;
  int max_name_tokens_ = 0;

  std::vector<Triple> triples_;
  std::vector<std::vector<NeighborEdge>> adjacency_;
};

}  // namespace kgqa
