#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nrmap {

/// MSB-first bit string used for DCI fields and allocation bitmaps.
class BitString {
public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : bits_(nbits, 0) {}

  /// Parses a string of '0'/'1' characters. Throws format_error on any other character.
  static BitString from_string(std::string_view s);
  /// Inverse of to_hex(): "<nbits>:<hex digits>".
  static BitString from_hex(std::string_view s);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
  void flip(std::size_t i) { bits_.at(i) ^= 1; }

  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }
  /// Appends the `width` low bits of `value`, most significant first.
  void append(std::uint64_t value, unsigned width);
  void append(const BitString& other);

  /// Reads `width` bits starting at `pos` as an unsigned integer.
  std::uint64_t read(std::size_t pos, unsigned width) const;
  BitString slice(std::size_t pos, std::size_t len) const;

  std::string to_string() const;
  /// "<nbits>:<hex>" with the last nibble zero-padded on the right.
  std::string to_hex() const;

  friend bool operator==(const BitString&, const BitString&) = default;

private:
  std::vector<std::uint8_t> bits_;
};

} // namespace nrmap
