#pragma once

// Snapshot files: "EAS1", u32 version 1, u64 N, f64 t, then N f64 values per
// field (rho then G, or u alone), all little-endian.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "eas/errors.hpp"
#include "eas/field.hpp"

namespace eas {

/// I/O failure on an output or input file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  double t = 0.0;
  std::vector<Field> fields;
};

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  std::uint64_t bits = 0;
  static_assert(sizeof(T) <= sizeof bits);
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

inline constexpr std::size_t kSnapshotHeader = 4 + 4 + 8 + 8;

}  // namespace detail

inline std::string encode_snapshot(const Snapshot& s) {
  if (s.fields.empty()) throw PreconditionError("snapshot needs at least one field");
  const std::size_t n = s.fields.front().size();
  for (const auto& f : s.fields)
    if (f.size() != n) throw PreconditionError("snapshot fields must share one grid");
  std::string out = "EAS1";
  detail::put_le<std::uint32_t>(out, 1);
  detail::put_le<std::uint64_t>(out, n);
  detail::put_le<double>(out, s.t);
  for (const auto& f : s.fields)
    for (double v : f.values) detail::put_le<double>(out, v);
  return out;
}

/// The field count follows from the payload size.
inline Snapshot decode_snapshot(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < detail::kSnapshotHeader || std::memcmp(p, "EAS1", 4) != 0)
    throw IoError("not a snapshot file (bad magic)");
  if (detail::get_le<std::uint32_t>(p + 4) != 1) throw IoError("unsupported snapshot version");
  const auto n = detail::get_le<std::uint64_t>(p + 8);
  Snapshot s;
  s.t = detail::get_le<double>(p + 16);
  const std::size_t payload = bytes.size() - detail::kSnapshotHeader;
  if (n == 0 || payload % (8 * n) != 0 || payload == 0) throw IoError("snapshot payload does not match N");
  const Grid g(static_cast<std::size_t>(n));
  const std::size_t count = payload / (8 * n);
  const unsigned char* q = p + detail::kSnapshotHeader;
  for (std::size_t c = 0; c < count; ++c) {
    Field f(g);
    for (std::size_t j = 0; j < n; ++j, q += 8) f[j] = detail::get_le<double>(q);
    s.fields.push_back(std::move(f));
  }
  return s;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_snapshot(const std::string& path, const Snapshot& s) { write_file(path, encode_snapshot(s)); }
inline Snapshot read_snapshot(const std::string& path) { return decode_snapshot(read_file(path)); }

/// prefix_000003.eas
inline std::string snapshot_path(const std::string& prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06zu.eas", index);
  return prefix + buf;
}

/// Header plus one row per record, using the record's own to_csv_row.
template <class Records>
std::string csv_text(const char* header, const Records& recs) {
  std::string out = header;
  out += '\n';
  for (const auto& r : recs) {
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

/// Fails early when the directory of `path` is missing or not writable.
inline void check_writable(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("output directory '" + dir.string() + "' does not exist");
  const bool existed = fs::exists(p, ec);
  {
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw IoError("cannot write '" + path + "'");
  }
  if (!existed) fs::remove(p, ec);
}

}  // namespace eas
