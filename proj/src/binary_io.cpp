#include "superres/binary_io.hpp"

#include <fstream>
#include <iterator>

#include "superres/error.hpp"

namespace superres::io {

void ByteReader::need(std::size_t n) const {
  require(n <= buf_.size() - pos_, ErrorKind::Format,
          "truncated file: need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) + ", have " +
              std::to_string(buf_.size() - pos_));
}

std::string ByteReader::bytes(std::size_t n) {
  need(n);
  std::string s(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return s;
}

std::vector<double> ByteReader::f64s(std::size_t n) {
  need(n * 8);
  std::vector<double> v(n);
  for (auto& x : v) x = f64();
  return v;
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const char> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span<const char>(text.data(), text.size()));
}

void write_container_header(ByteWriter& w, std::string_view magic, std::uint32_t version,
                            const nlohmann::json& header) {
  const std::string text = header.dump();
  w.bytes(magic);
  w.u32(version);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text);
}

nlohmann::json read_container_header(ByteReader& r, std::string_view magic, std::uint32_t version) {
  const std::string got = r.bytes(magic.size());
  require(got == magic, ErrorKind::Format, "bad magic, expected '" + std::string(magic) + "'");
  const std::uint32_t v = r.u32();
  require(v == version, ErrorKind::Format,
          "unsupported format version " + std::to_string(v) + " (expected " + std::to_string(version) + ")");
  const std::uint32_t len = r.u32();
  const std::string text = r.bytes(len);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("corrupt header: ") + e.what());
  }
}

}  // namespace superres::io
