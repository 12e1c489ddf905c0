#include "lnop/io/binary.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "lnop/error.hpp"

namespace lnop::io {
namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void BinaryWriter::put_magic(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }

void BinaryWriter::put_u32(std::uint32_t value) { put_le(bytes_, value, 4); }

void BinaryWriter::put_f64(double value) { put_le(bytes_, std::bit_cast<std::uint64_t>(value), 8); }

void BinaryWriter::put_f64s(std::span<const double> values) {
  bytes_.reserve(bytes_.size() + 8 * values.size());
  for (double v : values) put_f64(v);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw FormatError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

BinaryReader BinaryReader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return BinaryReader(std::move(bytes));
}

void BinaryReader::need(std::size_t count, std::string_view what) const {
  if (offset_ + count > bytes_.size()) {
    std::ostringstream os;
    os << "truncated container: need " << count << " bytes for " << what << " at byte offset " << offset_
       << " but file has " << bytes_.size() << " bytes";
    throw FormatError(os.str());
  }
}

void BinaryReader::expect_magic(std::string_view magic) {
  need(magic.size(), "magic");
  if (std::memcmp(bytes_.data() + offset_, magic.data(), magic.size()) != 0) {
    throw FormatError("bad magic at byte offset " + std::to_string(offset_) + " (expected '" + std::string(magic) +
                      "')");
  }
  offset_ += magic.size();
}

std::uint32_t BinaryReader::get_u32(std::string_view what) {
  need(4, what);
  auto v = static_cast<std::uint32_t>(get_le(bytes_.data() + offset_, 4));
  offset_ += 4;
  return v;
}

double BinaryReader::get_f64() {
  need(8, "value");
  auto v = std::bit_cast<double>(get_le(bytes_.data() + offset_, 8));
  offset_ += 8;
  return v;
}

void BinaryReader::get_f64s(std::span<double> out, std::string_view what) {
  need(8 * out.size(), what);
  for (auto& v : out) {
    v = std::bit_cast<double>(get_le(bytes_.data() + offset_, 8));
    offset_ += 8;
  }
}

void BinaryReader::expect_end() const {
  if (offset_ != bytes_.size()) {
    throw FormatError("trailing bytes after byte offset " + std::to_string(offset_) + " (file has " +
                      std::to_string(bytes_.size()) + " bytes)");
  }
}

std::filesystem::path sidecar_of(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace lnop::io
