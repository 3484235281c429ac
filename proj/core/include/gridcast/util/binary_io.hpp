#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "gridcast/error.hpp"

namespace gridcast::util {

/// Writes fixed-width integers and doubles in little-endian byte order.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(std::string_view raw) { out_.write(raw.data(), static_cast<std::streamsize>(raw.size())); }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }

  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void i64(std::int64_t v) { put(v); }
  void f64(double v) { put(v); }

 private:
  std::ostream& out_;
};

/// Reads what BinaryWriter wrote. Short reads raise LoadError naming the field.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::string bytes(std::size_t n, std::string_view field) {
    std::string raw(n, '\0');
    in_.read(raw.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) truncated(field);
    return raw;
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get(std::string_view field) {
    unsigned char buf[sizeof(T)];
    in_.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (static_cast<std::size_t>(in_.gcount()) != sizeof(T)) truncated(field);
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  std::uint32_t u32(std::string_view field) { return get<std::uint32_t>(field); }
  std::uint64_t u64(std::string_view field) { return get<std::uint64_t>(field); }
  std::int64_t i64(std::string_view field) { return get<std::int64_t>(field); }
  double f64(std::string_view field) { return get<double>(field); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  [[noreturn]] static void truncated(std::string_view field) {
    throw LoadError("truncated file while reading " + std::string(field));
  }

  std::istream& in_;
};

}  // namespace gridcast::util
