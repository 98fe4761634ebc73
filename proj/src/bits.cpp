#include "nrmap/bits.hpp"

#include "nrmap/errors.hpp"

#include <charconv>

namespace nrmap {

BitString BitString::from_string(std::string_view s)
{
  BitString out;
  out.bits_.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw format_error("bit string contains '" + std::string(1, c) + "'");
    }
    out.bits_.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

BitString BitString::from_hex(std::string_view s)
{
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    throw format_error("hex bit string must look like <nbits>:<hex>");
  }
  std::size_t nbits = 0;
  const auto head   = s.substr(0, colon);
  auto [ptr, ec]    = std::from_chars(head.data(), head.data() + head.size(), nbits);
  if (ec != std::errc{} || ptr != head.data() + head.size()) {
    throw format_error("bad bit count in hex string");
  }
  const auto hex = s.substr(colon + 1);
  if (hex.size() != (nbits + 3) / 4) {
    throw format_error("hex digit count does not match bit count");
  }
  BitString out;
  for (char c : hex) {
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw format_error("bad hex digit");
    }
    out.append(nibble, 4);
  }
  for (std::size_t i = nbits; i < out.size(); ++i) {
    if (out[i]) {
      throw format_error("non-zero padding in hex string");
    }
  }
  out.bits_.resize(nbits);
  return out;
}

void BitString::append(std::uint64_t value, unsigned width)
{
  if (width < 64 && (value >> width) != 0) {
    throw range_error("value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
  }
  for (unsigned i = width; i-- > 0;) {
    bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
  }
}

void BitString::append(const BitString& other)
{
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::uint64_t BitString::read(std::size_t pos, unsigned width) const
{
  if (width > 64 || pos + width > bits_.size()) {
    throw format_error("read past end of bit string");
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) {
    v = (v << 1) | bits_[pos + i];
  }
  return v;
}

BitString BitString::slice(std::size_t pos, std::size_t len) const
{
  if (pos + len > bits_.size()) {
    throw format_error("slice past end of bit string");
  }
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                   bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
  return out;
}

std::string BitString::to_string() const
{
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) {
    s.push_back(b ? '1' : '0');
  }
  return s;
}

std::string BitString::to_hex() const
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string s = std::to_string(bits_.size()) + ":";
  for (std::size_t i = 0; i < bits_.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      nibble <<= 1;
      if (i + k < bits_.size()) {
        nibble |= bits_[i + k];
      }
    }
    s.push_back(digits[nibble]);
  }
  return s;
}

} // namespace nrmap
