#pragma once

#include <stdexcept>

namespace kgqa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text; message carries the 1-based line number.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that violates a semantic requirement
// (empty triple source, label outside the relation set, ...).
struct DataError : Error {
  using Error::Error;
};

// Unknown entity/relation name or id.
struct NotFoundError : Error {
  using Error::Error;
};

// The question mentions nothing that resolves to a KG entity.
struct NoEntityError : Error {
  using Error::Error;
};

// Summarization found no neighbors to group.
struct EmptySummaryError : Error {
  using Error::Error;
};

// Tensor dimension mismatch.
struct ShapeError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Invalid runtime input (empty question, ...).
struct InputError : Error {
  using Error::Error;
};

}  // namespace kgqa
