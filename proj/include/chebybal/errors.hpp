#pragma once

#include <stdexcept>
#include <string>

namespace chebybal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mixing frames in wrench arithmetic or transforms.
struct FrameError : Error {
  using Error::Error;
};

// Scenario/stance file errors; carries the offending line and field.
struct ParseError : Error {
  ParseError(const std::string & msg, int line, const std::string & field)
      : Error(msg + " (line " + std::to_string(line) + ", field '" + field + "')"),
        line(line), field(field) {}
  int line;
  std::string field;
};

} // namespace chebybal
