#include "kgqa/text.hpp"

#include <cctype>

namespace kgqa {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

// Strip punctuation from both ends; interior punctuation ("co-acted") stays.
std::string trim_punct(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && is_punct(token[begin])) ++begin;
  while (end > begin && is_punct(token[end - 1])) --end;
  return std::string(token.substr(begin, end - begin));
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) {
      std::string token = trim_punct(text.substr(start, i - start));
      if (!token.empty()) tokens.push_back(fold_case(token));
    }
  }
  return tokens;
}

std::string normalize_name(std::string_view name) {
  const auto tokens = tokenize(name);
  return join_tokens(tokens, 0, tokens.size());
}

std::string join_tokens(const std::vector<std::string>& tokens,
                        std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace kgqa
