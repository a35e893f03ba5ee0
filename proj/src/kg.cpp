#include "kgqa/kg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"
#include "kgqa/util.hpp"

namespace kgqa {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Line iteration tolerant of trailing '\r' and a missing final newline.
std::vector<std::string> split_lines(const std::string& source) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string::npos) {
      if (start < source.size()) lines.push_back(source.substr(start));
      break;
    }
    std::string line = source.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t key = static_cast<std::uint32_t>(t.head);
    key = key * 0x9e3779b97f4a7c15ull + static_cast<std::uint32_t>(t.relation);
    key = key * 0x9e3779b97f4a7c15ull + static_cast<std::uint32_t>(t.tail);
    return static_cast<std::size_t>(key);
  }
};

}  // namespace

KnowledgeGraph KnowledgeGraph::load_triples(const std::string& source) {
  KnowledgeGraph kg;
  std::unordered_set<Triple, TripleHash> seen;

  const auto lines = split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      throw ParseError("triple file line " + std::to_string(i + 1) +
                       ": expected head<TAB>relation<TAB>tail, got \"" + line +
                       "\"");
    }
    const EntityId head = kg.intern_entity(fields[0]);
    const RelationId rel = kg.intern_relation(fields[1]);
    const EntityId tail = kg.intern_entity(fields[2]);
    const Triple triple{head, rel, tail};
    if (seen.insert(triple).second) kg.triples_.push_back(triple);
  }

  if (kg.triples_.empty()) {
    throw DataError("triple source contains no triples");
  }
  kg.build_adjacency();
  return kg;
}

KnowledgeGraph KnowledgeGraph::load_triples_file(const std::string& path) {
  return load_triples(read_file(path));
}

void KnowledgeGraph::load_aliases(const std::string& source) {
  const auto lines = split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("alias file line " + std::to_string(i + 1) +
                       ": expected canonical-name<TAB>alias");
    }
    const auto id = find_entity(fields[0]);
    if (!id) {
      throw DataError("alias file line " + std::to_string(i + 1) +
                      ": unknown canonical entity \"" + fields[0] + "\"");
    }
    register_surface(fields[1], *id);
  }
}

void KnowledgeGraph::load_aliases_file(const std::string& path) {
  load_aliases(read_file(path));
}

const std::string& KnowledgeGraph::entity_name(EntityId id) const {
  check_entity(id);
  return entity_names_[static_cast<std::size_t>(id)];
}

const std::string& KnowledgeGraph::relation_name(RelationId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= relation_names_.size()) {
    throw NotFoundError("unknown relation id " + std::to_string(id));
  }
  return relation_names_[static_cast<std::size_t>(id)];
}

std::optional<EntityId> KnowledgeGraph::find_entity(
    const std::string& name) const {
  const auto it = entity_by_surface_.find(normalize_name(name));
  if (it == entity_by_surface_.end()) return std::nullopt;
  return it->second;
}

EntityId KnowledgeGraph::resolve_entity(const std::string& name) const {
  if (const auto id = find_entity(name)) return *id;

  // Diagnostic only: nearest canonical names by edit distance.
  const std::string norm = normalize_name(name);
  std::vector<std::pair<int, std::string>> ranked;
  ranked.reserve(entity_names_.size());
  for (const auto& candidate : entity_names_) {
    ranked.emplace_back(levenshtein(norm, normalize_name(candidate)),
                        candidate);
  }
  std::sort(ranked.begin(), ranked.end());
  std::string message = "unknown entity \"" + name + "\"";
  if (!ranked.empty()) {
    message += "; nearest:";
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
      message += (i == 0 ? " " : ", ") + ranked[i].second;
    }
  }
  throw NotFoundError(message);
}

std::optional<RelationId> KnowledgeGraph::find_relation(
    const std::string& name) const {
  const auto it = relation_by_norm_.find(normalize_name(name));
  if (it == relation_by_norm_.end()) return std::nullopt;
  return it->second;
}

RelationId KnowledgeGraph::resolve_relation(const std::string& name) const {
  if (const auto id = find_relation(name)) return *id;
  throw NotFoundError("unknown relation \"" + name + "\"");
}

const std::vector<NeighborEdge>& KnowledgeGraph::neighbors(EntityId id) const {
  check_entity(id);
  return adjacency_[static_cast<std::size_t>(id)];
}

std::optional<EntityId> KnowledgeGraph::find_phrase(
    const std::string& normalized) const {
  const auto it = entity_by_surface_.find(normalized);
  if (it == entity_by_surface_.end()) return std::nullopt;
  return it->second;
}

std::string KnowledgeGraph::serialize_triples() const {
  std::string out;
  for (const Triple& t : triples_) {
    out += entity_name(t.head);
    out += '\t';
    out += relation_name(t.relation);
    out += '\t';
    out += entity_name(t.tail);
    out += '\n';
  }
  return out;
}

EntityId KnowledgeGraph::intern_entity(const std::string& name) {
  const auto it = entity_by_exact_name_.find(name);
  if (it != entity_by_exact_name_.end()) return it->second;
  const EntityId id = static_cast<EntityId>(entity_names_.size());
  entity_names_.push_back(name);
  entity_by_exact_name_.emplace(name, id);
  register_surface(name, id);
  return id;
}

RelationId KnowledgeGraph::intern_relation(const std::string& name) {
  const auto it = relation_by_exact_name_.find(name);
  if (it != relation_by_exact_name_.end()) return it->second;
  const RelationId id = static_cast<RelationId>(relation_names_.size());
  relation_names_.push_back(name);
  relation_by_exact_name_.emplace(name, id);
  relation_by_norm_.emplace(normalize_name(name), id);
  return id;
}

void KnowledgeGraph::register_surface(const std::string& surface,
                                      EntityId id) {
  const std::string norm = normalize_name(surface);
  if (norm.empty()) return;
  const auto [it, inserted] = entity_by_surface_.emplace(norm, id);
  if (!inserted && id < it->second) it->second = id;
  const int tokens = static_cast<int>(tokenize(norm).size());
  max_name_tokens_ = std::max(max_name_tokens_, tokens);
}

void KnowledgeGraph::build_adjacency() {
  adjacency_.assign(entity_names_.size(), {});
  for (const Triple& t : triples_) {
    adjacency_[static_cast<std::size_t>(t.head)].push_back(
        {t.relation, t.tail, Direction::kOutgoing});
    adjacency_[static_cast<std::size_t>(t.tail)].push_back(
        {t.relation, t.head, Direction::kIncoming});
  }
  for (auto& edges : adjacency_) {
    std::sort(edges.begin(), edges.end(),
              [](const NeighborEdge& a, const NeighborEdge& b) {
                return std::tie(a.relation, a.neighbor, a.direction) <
                       std::tie(b.relation, b.neighbor, b.direction);
              });
  }
}

void KnowledgeGraph::check_entity(EntityId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entity_names_.size()) {
    throw NotFoundError("unknown entity id " + std::to_string(id));
  }
}

}  // namespace kgqa
