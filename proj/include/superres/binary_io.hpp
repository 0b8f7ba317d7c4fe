#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace superres::io {

/// Append-only little-endian byte sink.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }

  const std::vector<char>& data() const noexcept { return buf_; }

 private:
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> buf_;
};

/// Bounds-checked little-endian reader; every overrun throws ErrorKind::Format.
class ByteReader {
 public:
  explicit ByteReader(std::vector<char> data) : buf_(std::move(data)) {}

  std::string bytes(std::size_t n);
  std::uint8_t u8() { return static_cast<std::uint8_t>(get<std::uint8_t>()); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::vector<double> f64s(std::size_t n);

  std::size_t remaining() const noexcept { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  template <class T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const char> data);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Container framing shared by the weight and dataset files:
/// 8-byte magic, u32 format version, u32 header length, JSON header.
void write_container_header(ByteWriter& w, std::string_view magic, std::uint32_t version,
                            const nlohmann::json& header);
nlohmann::json read_container_header(ByteReader& r, std::string_view magic, std::uint32_t version);

}  // namespace superres::io
