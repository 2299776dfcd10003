#pragma once

#include <stdexcept>
#include <string>

namespace homkit {

enum class error_kind {
  parse,         // malformed text input
  schema,        // schema / arity mismatch
  precondition,  // operation called outside its domain
  cap_exceeded,  // configured resource cap hit
  unsupported,   // input shape the construction does not cover
};

class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  error_kind kind() const noexcept { return kind_; }

 private:
  error_kind kind_;
};

[[noreturn]] inline void fail(error_kind kind, const std::string& what) { throw error(kind, what); }

}  // namespace homkit
