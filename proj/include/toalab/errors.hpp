#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace toalab {

/// Base of every error raised by the library. Each subclass names one failure
/// category so callers (and the CLI) can report it without string matching.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class config_error : public error {
public:
  using error::error;
};

class argument_error : public error {
public:
  using error::error;
};

class window_error : public error {
public:
  using error::error;
};

class delay_spread_error : public error {
public:
  using error::error;
};

class degenerate_input_error : public error {
public:
  using error::error;
};

class degenerate_fit_error : public error {
public:
  using error::error;
};

class coverage_error : public error {
public:
  using error::error;
};

class numeric_error : public error {
public:
  using error::error;
};

class shape_error : public error {
public:
  using error::error;
};

class dataset_error : public error {
public:
  using error::error;
};

/// Malformed file contents. `offset` is the byte position where decoding failed.
class format_error : public error {
public:
  format_error(const std::string& what, std::uint64_t offset);

  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

} // namespace toalab
