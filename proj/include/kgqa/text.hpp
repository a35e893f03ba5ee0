#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

// Placeholder substituted for entity mentions before classification and
// question encoding. Tokenization strips '<'/'>' from real text, so this
// token can only be produced by masking.
inline constexpr const char* kEntityPlaceholder = "<ent>";

// ASCII lowercase fold; bytes outside [A-Z] pass through untouched.
std::string fold_case(std::string_view text);

// Whitespace split, leading/trailing punctuation stripped per token,
// lowercase folded. Tokens that were pure punctuation are dropped.
std::vector<std::string> tokenize(std::string_view text);

// Canonical lookup key for a surface name: tokenize + join with one space.
std::string normalize_name(std::string_view name);

std::string join_tokens(const std::vector<std::string>& tokens,
                        std::size_t begin, std::size_t end);

}  // namespace kgqa
