#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlturing/grid.hpp"

namespace nlturing {

/// Shortest text form that round-trips a double ("%.17g").
std::string format_double(double x);

/// One row per grid row j, nx comma-separated values.
void write_field_csv(const std::filesystem::path& path, const Field2D& f);
Field2D read_field_csv(const std::filesystem::path& path);

/// 8-bit binary PGM scaled from min to max. The scaling is written to
/// `<path>.scale` as "min <value>\nmax <value>\n".
void write_field_pgm(const std::filesystem::path& path, const Field2D& f);

/// Raw layout: bytes 0-3 "NLTF", 4-7 nx, 8-11 ny, 12-15 zero (all uint32
/// little-endian), then nx*ny float64 little-endian in row-major order.
inline constexpr char kRawMagic[4] = {'N', 'L', 'T', 'F'};
void write_field_raw(const std::filesystem::path& path, const Field2D& f);
Field2D read_field_raw(const std::filesystem::path& path);

enum class SnapshotFormat { Csv, Raw };

/// Writes u/v snapshots into a directory and maintains `index.csv` with
/// `time,filename` rows (one row per written file).
class SnapshotWriter {
 public:
  SnapshotWriter(std::filesystem::path dir, SnapshotFormat format, bool pgm);

  void write(const FieldPair& s);
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  SnapshotFormat format_;
  bool pgm_;
  std::size_t count_ = 0;
  std::vector<std::filesystem::path> files_;
};

}  // namespace nlturing
