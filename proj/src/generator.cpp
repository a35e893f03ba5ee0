#include "kgqa/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/text.hpp"
#include "kgqa/util.hpp"

namespace kgqa {

namespace {

struct RelationTemplates {
  const char* relation;
  std::vector<const char*> single;
  std::vector<const char*> two_entity;  // empty when no intersection form
};

// Templates deliberately share function words across relations so relation
// identity hinges on a few content words.
const std::vector<RelationTemplates>& relation_templates() {
  static const std::vector<RelationTemplates> kTemplates = {
      {"directed_by",
       {"who directed {}", "who is the director of {}",
        "which person directed the movie {}"},
       {"who directed both {} and {}", "which person directed both {} and {}"}},
      {"written_by",
       {"who wrote {}", "who is the writer of {}",
        "which person wrote the movie {}"},
       {"who wrote both {} and {}", "which person wrote both {} and {}"}},
      {"starred_actors",
       {"who acted in {}", "who are the actors in the movie {}",
        "which person starred in {}"},
       {"who acted in both {} and {}", "which actors appear in both {} and {}"}},
      {"has_genre",
       {"what genre is {}", "what is the genre of the movie {}",
        "which genres describe {}"},
       {}},
      {"release_year",
       {"when was {} released", "what is the release year of the movie {}",
        "which year did {} come out"},
       {}},
  };
  return kTemplates;
}

std::string fill_template(const std::string& tmpl,
                          const std::vector<std::string>& args) {
  std::string out;
  std::size_t arg = 0;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{' && pos + 1 < tmpl.size() && tmpl[pos + 1] == '}') {
      out += args.at(arg++);
      pos += 2;
    } else {
      out += tmpl[pos++];
    }
  }
  return out;
}

// k distinct picks from [0, pool); deterministic rejection sampling.
std::vector<int> sample_distinct(Rng& rng, int pool, int k) {
  std::vector<int> picks;
  while (static_cast<int>(picks.size()) < k) {
    const int candidate = rng.uniform_int(0, pool - 1);
    if (std::find(picks.begin(), picks.end(), candidate) == picks.end()) {
      picks.push_back(candidate);
    }
  }
  return picks;
}

void append_if_absent(std::vector<int>& list, int value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) {
    list.push_back(value);
  }
}

std::vector<std::string> sorted_intersection_names(
    const std::vector<int>& a, const std::vector<int>& b,
    const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (int x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) out.push_back(names[x]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SyntheticDataset generate_synthetic(const GeneratorConfig& config) {
  if (config.movies < 2) throw ConfigError("generator: need >= 2 movies");
  if (config.persons < 6) throw ConfigError("generator: need >= 6 persons");
  if (config.genres < 3) throw ConfigError("generator: need >= 3 genres");
  if (config.years < 1) throw ConfigError("generator: need >= 1 year");
  if (config.movies + config.persons + config.genres + config.years < 20) {
    throw ConfigError("generator: need >= 20 entities in total");
  }
  if (config.single_questions < 1) {
    throw ConfigError("generator: need >= 1 single-entity question");
  }
  if (config.two_entity_questions < 0) {
    throw ConfigError("generator: negative two-entity question count");
  }
  if (config.embed_dim < 1) throw ConfigError("generator: embed_dim must be >= 1");
  const double holdout = 1.0 - config.train_fraction - config.dev_fraction;
  if (config.train_fraction <= 0 || config.dev_fraction <= 0 || holdout <= 0) {
    throw ConfigError("generator: split fractions must be positive");
  }

  Rng rng(config.seed);

  std::vector<std::string> movie_names, person_names, genre_names, year_names;
  for (int i = 1; i <= config.movies; ++i) {
    movie_names.push_back("Movie " + std::to_string(i));
  }
  for (int i = 1; i <= config.persons; ++i) {
    person_names.push_back("Person " + std::to_string(i));
  }
  for (int i = 1; i <= config.genres; ++i) {
    genre_names.push_back("Genre " + std::to_string(i));
  }
  for (int i = 0; i < config.years; ++i) {
    year_names.push_back(std::to_string(1980 + i));
  }

  // Per-movie neighbor lists, indexed into the name pools. The answer-count
  // mix keeps well over 60% of questions multi-answer.
  const int n_movies = config.movies;
  std::vector<std::vector<int>> directors(n_movies), writers(n_movies),
      actors(n_movies), genres(n_movies);
  std::vector<int> years(n_movies);
  for (int m = 0; m < n_movies; ++m) {
    directors[m] =
        sample_distinct(rng, config.persons, rng.uniform(0, 1) < 0.7 ? 2 : 1);
    writers[m] = sample_distinct(rng, config.persons, rng.uniform_int(2, 3));
    actors[m] = sample_distinct(rng, config.persons, rng.uniform_int(2, 4));
    genres[m] = sample_distinct(rng, config.genres, rng.uniform_int(2, 3));
    years[m] = rng.uniform_int(0, config.years - 1);
  }

  // Two-entity question specs come first: planting shared neighbors mutates
  // the KG, and every gold answer set is derived from the final graph.
  struct TwoEntitySpec {
    int relation_index;
    int movie_a, movie_b;
    int template_index;
  };
  std::vector<TwoEntitySpec> two_specs;
  std::set<std::tuple<int, int, int, int>> used_two;
  const auto& templates = relation_templates();
  std::vector<int> two_relation_indices;
  for (std::size_t r = 0; r < templates.size(); ++r) {
    if (!templates[r].two_entity.empty()) {
      two_relation_indices.push_back(static_cast<int>(r));
    }
  }
  int attempts = 0;
  const int max_attempts = config.two_entity_questions * 50 + 1000;
  while (static_cast<int>(two_specs.size()) < config.two_entity_questions) {
    if (++attempts > max_attempts) {
      throw ConfigError("generator: cannot place distinct two-entity questions");
    }
    const int r = two_relation_indices[static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<int>(two_relation_indices.size()) - 1))];
    const int a = rng.uniform_int(0, n_movies - 1);
    int b = rng.uniform_int(0, n_movies - 1);
    if (a == b) continue;
    const int tmpl = rng.uniform_int(
        0, static_cast<int>(templates[static_cast<std::size_t>(r)].two_entity.size()) - 1);
    if (!used_two.emplace(r, a, b, tmpl).second) continue;

    auto& list_a = r == 0 ? directors[a] : (r == 1 ? writers[a] : actors[a]);
    auto& list_b = r == 0 ? directors[b] : (r == 1 ? writers[b] : actors[b]);
    const int shared = rng.uniform(0, 1) < 0.6 ? 2 : 1;
    for (int pick : sample_distinct(rng, config.persons, shared)) {
      append_if_absent(list_a, pick);
      append_if_absent(list_b, pick);
    }
    two_specs.push_back({r, a, b, tmpl});
  }

  // KG freeze: emit triples movie by movie, relation by relation.
  std::string kg_text;
  int n_triples = 0;
  auto emit = [&](const std::string& head, const char* relation,
                  const std::string& tail) {
    kg_text += head;
    kg_text += '\t';
    kg_text += relation;
    kg_text += '\t';
    kg_text += tail;
    kg_text += '\n';
    ++n_triples;
  };
  for (int m = 0; m < n_movies; ++m) {
    for (int p : directors[m]) emit(movie_names[m], "directed_by", person_names[p]);
    for (int p : writers[m]) emit(movie_names[m], "written_by", person_names[p]);
    for (int p : actors[m]) emit(movie_names[m], "starred_actors", person_names[p]);
    for (int g : genres[m]) emit(movie_names[m], "has_genre", genre_names[g]);
    emit(movie_names[m], "release_year", year_names[years[m]]);
  }

  auto answers_for = [&](int relation_index, int m) {
    std::vector<std::string> out;
    switch (relation_index) {
      case 0:
        for (int p : directors[m]) out.push_back(person_names[p]);
        break;
      case 1:
        for (int p : writers[m]) out.push_back(person_names[p]);
        break;
      case 2:
        for (int p : actors[m]) out.push_back(person_names[p]);
        break;
      case 3:
        for (int g : genres[m]) out.push_back(genre_names[g]);
        break;
      default:
        out.push_back(year_names[years[m]]);
        break;
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  // Single-entity questions: distinct (movie, relation, template) combos.
  std::vector<std::tuple<int, int, int>> combos;
  for (int m = 0; m < n_movies; ++m) {
    for (std::size_t r = 0; r < templates.size(); ++r) {
      for (std::size_t t = 0; t < templates[r].single.size(); ++t) {
        combos.emplace_back(m, static_cast<int>(r), static_cast<int>(t));
      }
    }
  }
  rng.shuffle(combos);
  const int n_single =
      std::min<int>(config.single_questions, static_cast<int>(combos.size()));

  std::vector<QAExample> questions;
  for (int k = 0; k < n_single; ++k) {
    const auto [m, r, t] = combos[static_cast<std::size_t>(k)];
    QAExample ex;
    ex.question = fill_template(
        templates[static_cast<std::size_t>(r)].single[static_cast<std::size_t>(t)],
        {movie_names[m]});
    ex.entities = {movie_names[m]};
    ex.relation = templates[static_cast<std::size_t>(r)].relation;
    ex.answers = answers_for(r, m);
    questions.push_back(std::move(ex));
  }

  for (const TwoEntitySpec& spec : two_specs) {
    const auto& bank = templates[static_cast<std::size_t>(spec.relation_index)];
    QAExample ex;
    ex.question = fill_template(
        bank.two_entity[static_cast<std::size_t>(spec.template_index)],
        {movie_names[spec.movie_a], movie_names[spec.movie_b]});
    ex.entities = {movie_names[spec.movie_a], movie_names[spec.movie_b]};
    ex.relation = bank.relation;
    const auto& list_a = spec.relation_index == 0
                             ? directors[spec.movie_a]
                             : (spec.relation_index == 1 ? writers[spec.movie_a]
                                                         : actors[spec.movie_a]);
    const auto& list_b = spec.relation_index == 0
                             ? directors[spec.movie_b]
                             : (spec.relation_index == 1 ? writers[spec.movie_b]
                                                         : actors[spec.movie_b]);
    ex.answers = sorted_intersection_names(list_a, list_b, person_names);
    questions.push_back(std::move(ex));
  }

  // Splits are disjoint by question string; combo/spec construction already
  // guarantees distinct strings.
  rng.shuffle(questions);
  std::set<std::string> seen_questions;
  std::vector<QAExample> unique;
  for (auto& q : questions) {
    if (seen_questions.insert(q.question).second) unique.push_back(std::move(q));
  }

  SyntheticDataset data;
  data.n_questions = static_cast<int>(unique.size());
  const int n_train = static_cast<int>(unique.size() * config.train_fraction);
  const int n_dev = static_cast<int>(unique.size() * config.dev_fraction);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (static_cast<int>(i) < n_train) {
      data.train.push_back(unique[i]);
    } else if (static_cast<int>(i) < n_train + n_dev) {
      data.dev.push_back(unique[i]);
    } else {
      data.test.push_back(unique[i]);
    }
  }

  int multi = 0;
  for (const auto& q : unique) {
    if (q.answers.size() >= 2) ++multi;
  }
  data.multi_answer_fraction =
      unique.empty() ? 0.0
                     : static_cast<double>(multi) / static_cast<double>(unique.size());

  // Word vectors for the full surface vocabulary. Entries are seeded per
  // token so the file is independent of generation order.
  std::set<std::string> vocab;
  vocab.insert(kEntityPlaceholder);
  auto add_tokens = [&](const std::string& text) {
    for (const auto& token : tokenize(text)) vocab.insert(token);
  };
  for (const auto& name : movie_names) add_tokens(name);
  for (const auto& name : person_names) add_tokens(name);
  for (const auto& name : genre_names) add_tokens(name);
  for (const auto& name : year_names) add_tokens(name);
  for (const auto& bank : templates) {
    for (const char* tmpl : bank.single) add_tokens(tmpl);
    for (const char* tmpl : bank.two_entity) add_tokens(tmpl);
  }

  std::string vectors_text;
  char buf[32];
  for (const auto& token : vocab) {
    Rng token_rng(fnv1a64(token) ^ config.seed);
    vectors_text += token;
    for (int i = 0; i < config.embed_dim; ++i) {
      std::snprintf(buf, sizeof(buf), " %.6f", token_rng.uniform(-0.5, 0.5));
      vectors_text += buf;
    }
    vectors_text += '\n';
  }

  // Reload through the store for validated counts.
  const KnowledgeGraph kg = KnowledgeGraph::load_triples(kg_text);
  data.kg_text = std::move(kg_text);
  data.vectors_text = std::move(vectors_text);
  data.n_entities = static_cast<int>(kg.entity_count());
  data.n_relations = static_cast<int>(kg.relation_count());
  data.n_triples = n_triples;
  return data;
}

}  // namespace kgqa
