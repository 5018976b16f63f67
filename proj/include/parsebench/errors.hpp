#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace parsebench {

// Structural problem in a table HTML fragment (unbalanced tags, bad spans,
// unknown structural tags).
class MalformedHtml : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem inside the content of a single td.
class MalformedCell : public MalformedHtml {
 public:
  using MalformedHtml::MalformedHtml;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record in an input file does not follow the declared schema. The
// location is "line N" for JSONL files (1-based physical line) and a JSON
// path such as "annotations[3]" for JSON documents.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string location, const std::string& what)
      : std::runtime_error(location + ": " + what),
        location_(std::move(location)) {}

  static SchemaError at_line(std::size_t line, const std::string& what) {
    return SchemaError("line " + std::to_string(line), what);
  }

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class EmptyCorpus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyGroundTruth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by batch scoring when ids do not line up and strict id checking is on.
class IdMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parsebench
