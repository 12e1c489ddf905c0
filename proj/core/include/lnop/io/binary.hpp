#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lnop::io {

/// Accumulates a little-endian byte image, written to disk in one go.
class BinaryWriter {
 public:
  void put_magic(std::string_view magic);
  void put_u32(std::uint32_t value);
  void put_f64(double value);
  void put_f64s(std::span<const double> values);

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  /// Writes atomically-ish: to `path` + ".tmp", then renames.
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked little-endian reader over a whole file image. Every
/// failure is a FormatError that names the byte offset.
class BinaryReader {
 public:
  explicit BinaryReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}
  static BinaryReader open(const std::filesystem::path& path);

  void expect_magic(std::string_view magic);
  std::uint32_t get_u32(std::string_view what);
  double get_f64();
  void get_f64s(std::span<double> out, std::string_view what);

  std::size_t offset() const noexcept { return offset_; }
  std::size_t size() const noexcept { return bytes_.size(); }
  void expect_end() const;

 private:
  void need(std::size_t count, std::string_view what) const;
  std::vector<std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

/// `<path>.json`, the metadata file that accompanies a binary container.
std::filesystem::path sidecar_of(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace lnop::io
