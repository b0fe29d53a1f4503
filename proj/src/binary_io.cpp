#include "retro/binary_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "retro/errors.hpp"

namespace retro::io {

void BinaryWriter::bytes(const unsigned char* data, std::size_t n) {
  out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw FormatError("write failed");
}

void BinaryWriter::header(std::string_view magic, std::uint32_t version) {
  bytes(reinterpret_cast<const unsigned char*>(magic.data()), magic.size());
  u32(version);
}

void BinaryWriter::u32(std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  bytes(b.data(), b.size());
}

void BinaryWriter::u64(std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  bytes(b.data(), b.size());
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::u32_array(const std::vector<std::uint32_t>& values) {
  u64(values.size());
  for (auto v : values) u32(v);
}

void BinaryWriter::u64_array(const std::vector<std::uint64_t>& values) {
  u64(values.size());
  for (auto v : values) u64(v);
}

void BinaryReader::fail(const std::string& what) const {
  throw FormatError(source_ + ": " + what);
}

void BinaryReader::bytes(unsigned char* data, std::size_t n) {
  in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated input");
}

void BinaryReader::header(std::string_view magic, std::uint32_t version) {
  std::array<unsigned char, 4> m{};
  bytes(m.data(), m.size());
  if (magic.size() != 4 || std::memcmp(m.data(), magic.data(), 4) != 0) {
    fail("bad magic, expected \"" + std::string(magic) + "\"");
  }
  const auto found = u32();
  if (found != version) {
    fail("format version " + std::to_string(found) + " is not supported (expected " +
         std::to_string(version) + ")");
  }
}

std::uint32_t BinaryReader::u32() {
  std::array<unsigned char, 4> b{};
  bytes(b.data(), b.size());
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::array<unsigned char, 8> b{};
  bytes(b.data(), b.size());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::vector<std::uint32_t> BinaryReader::u32_array(std::uint64_t max_len) {
  const auto n = u64();
  if (n > max_len) fail("array length " + std::to_string(n) + " out of range");
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) v = u32();
  return out;
}

std::vector<std::uint64_t> BinaryReader::u64_array(std::uint64_t max_len) {
  const auto n = u64();
  if (n > max_len) fail("array length " + std::to_string(n) + " out of range");
  std::vector<std::uint64_t> out(n);
  for (auto& v : out) v = u64();
  return out;
}

void BinaryReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes after payload");
}

}  // namespace retro::io
