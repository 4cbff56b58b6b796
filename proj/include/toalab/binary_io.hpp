#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "toalab/errors.hpp"

namespace toalab::io {

/// Little-endian writer that tracks the byte position.
class byte_writer {
public:
  explicit byte_writer(std::ostream& out) : out_(out) {}

  void magic(std::string_view tag) { raw(tag.data(), tag.size()); }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v)); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }

  std::uint64_t position() const { return position_; }

private:
  template <typename U>
  void le(U v) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    raw(bytes.data(), bytes.size());
  }

  void raw(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) {
      throw error("write failed at byte " + std::to_string(position_));
    }
    position_ += n;
  }

  std::ostream& out_;
  std::uint64_t position_ = 0;
};

/// Little-endian reader; truncation raises format_error with the offset.
class byte_reader {
public:
  explicit byte_reader(std::istream& in) : in_(in) {}

  void expect_magic(std::string_view tag) {
    const std::uint64_t at = position_;
    std::string got(tag.size(), '\0');
    raw(got.data(), got.size());
    if (got != tag) {
      throw format_error("bad magic, expected '" + std::string(tag) + "'", at);
    }
  }
  std::uint8_t u8() {
    std::uint8_t v = 0;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(le<std::uint32_t>()); }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }

  std::uint64_t position() const { return position_; }

  /// Fails unless the stream is exhausted.
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw format_error("trailing bytes after the last record", position_);
    }
  }

private:
  template <typename U>
  U le() {
    std::array<unsigned char, sizeof(U)> bytes{};
    raw(bytes.data(), bytes.size());
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(bytes[i]) << (8 * i);
    }
    return v;
  }

  void raw(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw format_error("unexpected end of file", position_ + static_cast<std::uint64_t>(in_.gcount()));
    }
    position_ += n;
  }

  std::istream& in_;
  std::uint64_t position_ = 0;
};

} // namespace toalab::io
