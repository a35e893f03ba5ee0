#include "kgqa/linking.hpp"

#include <algorithm>
#include <unordered_set>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

std::vector<Mention> link_entities(const std::vector<std::string>& tokens,
                                   const KnowledgeGraph& kg) {
  if (tokens.empty()) throw InputError("empty question");

  std::vector<Mention> mentions;
  const std::size_t n = tokens.size();
  const std::size_t max_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(kg.max_name_tokens()));

  std::size_t pos = 0;
  while (pos < n) {
    bool matched = false;
    const std::size_t longest = std::min(max_len, n - pos);
    for (std::size_t len = longest; len >= 1; --len) {
      const std::string phrase = join_tokens(tokens, pos, pos + len);
      if (const auto id = kg.find_phrase(phrase)) {
        mentions.push_back({phrase, static_cast<int>(pos),
                            static_cast<int>(pos + len), *id});
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }

  if (mentions.empty()) {
    throw NoEntityError("no KG entity mentioned in question");
  }
  return mentions;
}

std::vector<EntityId> question_entities(const std::vector<Mention>& mentions) {
  std::vector<EntityId> entities;
  std::unordered_set<EntityId> seen;
  for (const Mention& m : mentions) {
    if (seen.insert(m.entity).second) entities.push_back(m.entity);
  }
  return entities;
}

std::vector<std::string> mask_mentions(const std::vector<std::string>& tokens,
                                       const std::vector<Mention>& mentions) {
  std::vector<std::string> masked;
  masked.reserve(tokens.size());
  std::size_t next_mention = 0;
  auto sorted = mentions;
  std::sort(sorted.begin(), sorted.end(),
            [](const Mention& a, const Mention& b) { return a.begin < b.begin; });

  for (std::size_t i = 0; i < tokens.size();) {
    if (next_mention < sorted.size() &&
        static_cast<int>(i) == sorted[next_mention].begin) {
      masked.emplace_back(kEntityPlaceholder);
      i = static_cast<std::size_t>(sorted[next_mention].end);
      ++next_mention;
    } else {
      masked.push_back(tokens[i]);
      ++i;
    }
  }
  return masked;
}

Subgraph extract_subgraph(const KnowledgeGraph& kg,
                          const std::vector<EntityId>& entities) {
  if (entities.empty()) throw InputError("no question entities");
  std::unordered_set<EntityId> wanted;
  for (EntityId e : entities) {
    kg.entity_name(e);  // id validation
    wanted.insert(e);
  }

  Subgraph sub;
  for (const Triple& t : kg.triples()) {
    if (wanted.count(t.head) || wanted.count(t.tail)) sub.triples.push_back(t);
  }
  std::unordered_set<EntityId> seen;
  for (EntityId e : entities) {
    if (seen.insert(e).second) sub.question_entities.push_back(e);
  }
  return sub;
}

}  // namespace kgqa
