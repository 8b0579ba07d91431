#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pommer {

enum class FormatErrorKind { Io, BadMagic, BadVersion, ShapeMismatch, Truncated, InvalidValue };

const char* to_string(FormatErrorKind kind) noexcept;

/// Raised by every file reader in the suite. The kind distinguishes the
/// failure classes callers are expected to react to differently.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

inline const char* to_string(FormatErrorKind kind) noexcept {
  switch (kind) {
    case FormatErrorKind::Io: return "io";
    case FormatErrorKind::BadMagic: return "bad_magic";
    case FormatErrorKind::BadVersion: return "bad_version";
    case FormatErrorKind::ShapeMismatch: return "shape_mismatch";
    case FormatErrorKind::Truncated: return "truncated";
    case FormatErrorKind::InvalidValue: return "invalid_value";
  }
  return "unknown";
}

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts need byte swapping");

/// Appends little-endian fields to a byte buffer.
class ByteWriter {
 public:
  template <class T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  void put_bytes(std::string_view raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }

  template <class T>
    requires std::is_arithmetic_v<T>
  void put_span(std::span<const T> values) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
    bytes_.insert(bytes_.end(), p, p + values.size_bytes());
  }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::vector<std::uint8_t> take() noexcept { return std::move(bytes_); }

  void write_to(std::ostream& out) const {
    out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw FormatError(FormatErrorKind::Io, "write failed");
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Reads little-endian fields from a stream; short reads raise Truncated.
class StreamReader {
 public:
  explicit StreamReader(std::istream& in) : in_(in) {}

  template <class T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    read_raw(&value, sizeof(T));
    return value;
  }

  std::string get_string(std::size_t n) {
    std::string s(n, '\0');
    read_raw(s.data(), n);
    return s;
  }

  template <class T>
    requires std::is_arithmetic_v<T>
  void get_span(std::span<T> out) {
    read_raw(out.data(), out.size_bytes());
  }

  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  void read_raw(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(FormatErrorKind::Truncated, "unexpected end of file");
    }
  }

  std::istream& in_;
};

}  // namespace pommer
