#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairnet {

// Base of every error thrown by the library. The CLI maps `usage` to exit
// code 1, `data` to 2 and anything else to 3.
class Error : public std::runtime_error {
 public:
  enum class Category { usage, data, internal };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class InvalidNode : public Error {
 public:
  explicit InvalidNode(const std::string& what) : Error(Category::data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::usage, what) {}
};

// No candidate carries positive attachment weight.
class EmptySupport : public Error {
 public:
  explicit EmptySupport(const std::string& what) : Error(Category::data, what) {}
};

class UndefinedMeasure : public Error {
 public:
  explicit UndefinedMeasure(const std::string& what) : Error(Category::data, what) {}
};

class NotConnected : public Error {
 public:
  explicit NotConnected(const std::string& what) : Error(Category::data, what) {}
};

class SeedingError : public Error {
 public:
  SeedingError(const std::string& what, std::size_t max_achievable_minority)
      : Error(Category::data, what), max_minority_(max_achievable_minority) {}

  // Largest minority seed count the graph can supply.
  std::size_t max_achievable_minority() const noexcept { return max_minority_; }

 private:
  std::size_t max_minority_;
};

class DegenerateTrace : public Error {
 public:
  explicit DegenerateTrace(const std::string& what) : Error(Category::data, what) {}
};

class EmptyResult : public Error {
 public:
  explicit EmptyResult(const std::string& what) : Error(Category::data, what) {}
};

// Diagnostic codes for graph-file parsing. Each rejection has its own code so
// callers and tests can tell them apart.
enum class ParseCode {
  bad_header,
  malformed_line,
  duplicate_node,
  unknown_group,
  unlabeled_node,
  self_loop,
  duplicate_edge,
  dangling_endpoint,
  io_failure,
};

inline const char* to_string(ParseCode code) {
  switch (code) {
    case ParseCode::bad_header: return "E-HEADER";
    case ParseCode::malformed_line: return "E-MALFORMED";
    case ParseCode::duplicate_node: return "E-DUPNODE";
    case ParseCode::unknown_group: return "E-GROUP";
    case ParseCode::unlabeled_node: return "E-UNLABELED";
    case ParseCode::self_loop: return "E-SELFLOOP";
    case ParseCode::duplicate_edge: return "E-DUPEDGE";
    case ParseCode::dangling_endpoint: return "E-DANGLING";
    case ParseCode::io_failure: return "E-IO";
  }
  return "E-UNKNOWN";
}

class ParseError : public Error {
 public:
  ParseError(ParseCode code, std::size_t line, const std::string& detail)
      : Error(Category::data, std::string(to_string(code)) + " line " +
                                  std::to_string(line) + ": " + detail),
        code_(code),
        line_(line) {}

  ParseCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseCode code_;
  std::size_t line_;
};

}  // namespace fairnet
