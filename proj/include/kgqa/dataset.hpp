#pragma once

#include <string>
#include <vector>

namespace kgqa {

// One QA supervision/evaluation unit. `relation` may be empty for datasets
// that only carry answers (evaluation still works; RCNN training does not).
struct QAExample {
  std::string question;
  std::vector<std::string> entities;
  std::string relation;
  std::vector<std::string> answers;
};

// JSON-lines with fields `question`, `entities`, `relation`, `answers`.
std::vector<QAExample> load_qa_jsonl(const std::string& source);
std::vector<QAExample> load_qa_jsonl_file(const std::string& path);
std::string qa_to_jsonl(const std::vector<QAExample>& examples);

// WikiMovies-style lines: `question TAB answer, answer, ...` with question
// entities wrapped in [brackets]; an optional leading line number is
// stripped. Relations are unknown in this format.
std::vector<QAExample> load_wikimovies(const std::string& source);

}  // namespace kgqa
