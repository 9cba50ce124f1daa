#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace readkit {

// Execution policy for batch kernels. Parallel paths must produce results
// bit-identical to Serial; tests compare the two.
enum class Exec { Serial, Parallel };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyTextError : Error {
  EmptyTextError() : Error("text has no non-whitespace content") {}
};

struct NoWordsError : Error {
  NoWordsError() : Error("text contains no word tokens") {}
};

struct FileError : Error {
  explicit FileError(const std::string& path)
      : Error("cannot open file: " + path), path(path) {}
  FileError(const std::string& path, const std::string& detail)
      : Error(path + ": " + detail), path(path) {}
  std::string path;
};

struct EmptyHistogramError : Error {
  EmptyHistogramError() : Error("histogram has no nonzero level") {}
};

struct EmptyRunError : Error {
  EmptyRunError() : Error("evaluation run contains no pairs") {}
};

struct InsufficientLevelError : Error {
  InsufficientLevelError(int level, std::int64_t available, std::int64_t required)
      : Error("level " + std::to_string(level) + " has " + std::to_string(available) +
              " records, needs " + std::to_string(required)),
        level(level), available(available), required(required) {}
  int level;
  std::int64_t available;
  std::int64_t required;
};

struct UnknownLevelError : Error {
  explicit UnknownLevelError(int level)
      : Error("readability level " + std::to_string(level) + " outside [1,16]") {}
};

struct AllMaskedError : Error {
  AllMaskedError() : Error("attention mask has no active position") {}
};

struct NonFiniteLossError : Error {
  explicit NonFiniteLossError(const std::string& detail)
      : Error("non-finite loss: " + detail) {}
};

}  // namespace readkit
