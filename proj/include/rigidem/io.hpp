#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"

namespace rigidem {

// Shortest round-trip decimal text for a double, locale independent.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError("expected a number for " + what + ", got '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError("expected an integer for " + what + ", got '" + s + "'");
  return v;
}

namespace detail {

inline void write_raw(const std::string& path, const double* data, std::int64_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * static_cast<std::int64_t>(sizeof(double))));
  if (!out) throw IoError("short write to '" + path + "'");
}

inline void read_raw(const std::string& path, double* data, std::int64_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * static_cast<std::int64_t>(sizeof(double))));
  if (in.gcount() != static_cast<std::streamsize>(count * static_cast<std::int64_t>(sizeof(double))))
    throw IoError("'" + path + "' is shorter than its header promises");
  char extra;
  if (in.read(&extra, 1))
    throw IoError("'" + path + "' is longer than its header promises");
}

// Sidecar headers are "key value" lines.
inline std::vector<std::pair<std::string, std::string>> read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sidecar '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string rest;
    std::getline(ls, rest);
    std::size_t start = rest.find_first_not_of(" \t");
    entries.emplace_back(key, start == std::string::npos ? "" : rest.substr(start));
  }
  return entries;
}

inline std::string sidecar_value(const std::vector<std::pair<std::string, std::string>>& entries,
                                 const std::string& key, const std::string& path) {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw IoError("sidecar '" + path + "' is missing key '" + key + "'");
}

}  // namespace detail

// Field snapshots: one flat little-endian float64 block, component-major in
// the order Ex Ey Ez Bx By Bz, plus a textual sidecar "<path>.meta".
inline void write_field_snapshot(const std::string& path, const FieldPair& pair, double t) {
  const Grid& g = pair.E.grid;
  std::int64_t m = g.size();
  std::vector<double> block(static_cast<std::size_t>(6 * m));
  const RealBuffer* comps[6] = {&pair.E.x, &pair.E.y, &pair.E.z,
                                &pair.B.x, &pair.B.y, &pair.B.z};
  for (int c = 0; c < 6; ++c)
    std::copy(comps[c]->begin(), comps[c]->end(), block.begin() + c * m);
  detail::write_raw(path, block.data(), 6 * m);
  std::ofstream meta(path + ".meta");
  if (!meta) throw IoError("cannot open '" + path + ".meta' for writing");
  meta << "n " << g.n << "\n";
  meta << "L " << format_double(g.L) << "\n";
  meta << "t " << format_double(t) << "\n";
  meta << "components Ex Ey Ez Bx By Bz\n";
  if (!meta) throw IoError("short write to '" + path + ".meta'");
}

struct SnapshotData {
  FieldPair pair;
  double t = 0.0;
};

inline SnapshotData read_field_snapshot(const std::string& path) {
  auto entries = detail::read_sidecar(path + ".meta");
  int n = static_cast<int>(parse_long(detail::sidecar_value(entries, "n", path + ".meta"), "n"));
  double L = parse_double(detail::sidecar_value(entries, "L", path + ".meta"), "L");
  double t = parse_double(detail::sidecar_value(entries, "t", path + ".meta"), "t");
  std::string comps = detail::sidecar_value(entries, "components", path + ".meta");
  if (comps != "Ex Ey Ez Bx By Bz")
    throw IoError("snapshot '" + path + "' has unsupported component order '" + comps + "'");
  Grid g = make_grid(L, n);
  std::int64_t m = g.size();
  std::vector<double> block(static_cast<std::size_t>(6 * m));
  detail::read_raw(path, block.data(), 6 * m);
  SnapshotData snap;
  snap.pair = FieldPair(g);
  snap.t = t;
  RealBuffer* comps_out[6] = {&snap.pair.E.x, &snap.pair.E.y, &snap.pair.E.z,
                              &snap.pair.B.x, &snap.pair.B.y, &snap.pair.B.z};
  for (int c = 0; c < 6; ++c)
    std::copy(block.begin() + c * m, block.begin() + (c + 1) * m, comps_out[c]->begin());
  return snap;
}

struct ScalarTable {
  Grid grid;
  std::vector<double> values;
};

// Scalar sample tables (used for tabulated weights) share the snapshot
// conventions: flat float64 block plus "<path>.meta" carrying dims and
// spacing.
inline ScalarTable read_scalar_table(const std::string& path) {
  auto entries = detail::read_sidecar(path + ".meta");
  int n = static_cast<int>(parse_long(detail::sidecar_value(entries, "n", path + ".meta"), "n"));
  double L = parse_double(detail::sidecar_value(entries, "L", path + ".meta"), "L");
  ScalarTable table;
  table.grid = make_grid(L, n);
  table.values.resize(static_cast<std::size_t>(table.grid.size()));
  detail::read_raw(path, table.values.data(), table.grid.size());
  return table;
}

inline void write_scalar_table(const std::string& path, const ScalarTable& table) {
  detail::write_raw(path, table.values.data(), table.grid.size());
  std::ofstream meta(path + ".meta");
  if (!meta) throw IoError("cannot open '" + path + ".meta' for writing");
  meta << "n " << table.grid.n << "\n";
  meta << "L " << format_double(table.grid.L) << "\n";
  meta << "dx " << format_double(table.grid.dx()) << "\n";
  if (!meta) throw IoError("short write to '" + path + ".meta'");
}

}  // namespace rigidem
