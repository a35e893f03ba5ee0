#include "kgqa/dataset.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "kgqa/errors.hpp"

namespace kgqa {

namespace {

using nlohmann::json;

std::vector<std::string> split_lines(const std::string& source) {
  std::vector<std::string> lines;
  std::istringstream in(source);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<QAExample> load_qa_jsonl(const std::string& source) {
  std::vector<QAExample> examples;
  const auto lines = split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("qa file line " + std::to_string(i + 1) + ": " +
                       e.what());
    }
    QAExample ex;
    try {
      ex.question = j.at("question").get<std::string>();
      ex.entities = j.value("entities", std::vector<std::string>{});
      ex.relation = j.value("relation", std::string{});
      ex.answers = j.value("answers", std::vector<std::string>{});
    } catch (const json::exception& e) {
      throw ParseError("qa file line " + std::to_string(i + 1) + ": " +
                       e.what());
    }
    // Answers may be absent on relation-label-only rows (classifier
    // training data); everything else needs a gold answer set.
    if (ex.question.empty() || (ex.answers.empty() && ex.relation.empty())) {
      throw DataError("qa file line " + std::to_string(i + 1) +
                      ": needs a question plus answers or a relation");
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<QAExample> load_qa_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_qa_jsonl(buf.str());
}

std::string qa_to_jsonl(const std::vector<QAExample>& examples) {
  std::string out;
  for (const QAExample& ex : examples) {
    json j;
    j["question"] = ex.question;
    j["entities"] = ex.entities;
    j["relation"] = ex.relation;
    j["answers"] = ex.answers;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<QAExample> load_wikimovies(const std::string& source) {
  std::vector<QAExample> examples;
  const auto lines = split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("wikimovies file line " + std::to_string(i + 1) +
                       ": missing TAB separator");
    }
    std::string question = line.substr(0, tab);
    const std::string answer_list = line.substr(tab + 1);

    // Strip the conventional leading example number.
    std::size_t pos = 0;
    while (pos < question.size() &&
           std::isdigit(static_cast<unsigned char>(question[pos]))) {
      ++pos;
    }
    if (pos > 0 && pos < question.size() && question[pos] == ' ') {
      question.erase(0, pos + 1);
    }

    QAExample ex;
    // Bracketed spans mark question entities; brackets are removed from the
    // question text itself.
    std::string cleaned;
    cleaned.reserve(question.size());
    std::size_t cursor = 0;
    while (cursor < question.size()) {
      if (question[cursor] == '[') {
        const auto close = question.find(']', cursor);
        if (close == std::string::npos) {
          throw ParseError("wikimovies file line " + std::to_string(i + 1) +
                           ": unbalanced bracket");
        }
        const std::string entity =
            question.substr(cursor + 1, close - cursor - 1);
        ex.entities.push_back(entity);
        cleaned += entity;
        cursor = close + 1;
      } else {
        cleaned += question[cursor];
        ++cursor;
      }
    }
    ex.question = cleaned;

    std::size_t start = 0;
    while (start <= answer_list.size()) {
      const auto comma = answer_list.find(", ", start);
      if (comma == std::string::npos) {
        const std::string tailpiece = answer_list.substr(start);
        if (!tailpiece.empty()) ex.answers.push_back(tailpiece);
        break;
      }
      ex.answers.push_back(answer_list.substr(start, comma - start));
      start = comma + 2;
    }
    if (ex.question.empty() || ex.answers.empty()) {
      throw DataError("wikimovies file line " + std::to_string(i + 1) +
                      ": question and answers must be non-empty");
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

}  // namespace kgqa
