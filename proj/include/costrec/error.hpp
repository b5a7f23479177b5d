#pragma once

#include <stdexcept>
#include <string>

namespace costrec {

struct Pos {
    int line = 0;
    int col = 0;
    [[nodiscard]] bool known() const { return line > 0; }
    [[nodiscard]] std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
  public:
    SyntaxError(Pos pos, const std::string& msg)
        : Error("syntax error at " + pos.str() + ": " + msg), pos_(pos) {}
    [[nodiscard]] Pos pos() const { return pos_; }

  private:
    Pos pos_;
};

class TypeError : public Error {
  public:
    using Error::Error;
};

class EvalError : public Error {
  public:
    using Error::Error;
};

/// Model configuration or model applicability problems.
class ModelError : public Error {
  public:
    using Error::Error;
};

/// Raised when a join or enumeration would range over an infinite set.
class EnumerationError : public Error {
  public:
    using Error::Error;
};

} // namespace costrec
