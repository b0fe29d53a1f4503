#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace retro::io {

/// Fixed-width little-endian writer. Every on-disk artifact starts with a
/// four-byte magic and a u32 format version (see docs/FORMAT.md).
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void header(std::string_view magic, std::uint32_t version);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void u32_array(const std::vector<std::uint32_t>& values);
  void u64_array(const std::vector<std::uint64_t>& values);

 private:
  void bytes(const unsigned char* data, std::size_t n);
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Throws FormatError on a magic mismatch or a version other than `version`.
  void header(std::string_view magic, std::uint32_t version);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  /// Length-prefixed arrays; `max_len` guards against corrupt size fields.
  std::vector<std::uint32_t> u32_array(std::uint64_t max_len);
  std::vector<std::uint64_t> u64_array(std::uint64_t max_len);
  void expect_end();

  [[noreturn]] void fail(const std::string& what) const;

 private:
  void bytes(unsigned char* data, std::size_t n);
  std::istream& in_;
  std::string source_;
};

}  // namespace retro::io
