#include "nlturing/snapshot_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlturing {

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw snapshot I/O assumes a little-endian host");

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void put_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), 4);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(const std::filesystem::path& path, const Field2D& f) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < f.ny; ++j) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      if (i) out << ',';
      out << format_double(f(i, j));
    }
    out << '\n';
  }
}

Field2D read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Field2D f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      f.data.push_back(std::stod(cell));
      ++cols;
    }
    if (f.ny == 0) f.nx = cols;
    else if (cols != f.nx) throw std::runtime_error("ragged CSV field in " + path.string());
    ++f.ny;
  }
  return f;
}

void write_field_pgm(const std::filesystem::path& path, const Field2D& f) {
  if (f.data.empty()) throw std::invalid_argument("empty field");
  const auto [lo_it, hi_it] = std::minmax_element(f.data.begin(), f.data.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  auto out = open_out(path, true);
  out << "P5\n" << f.nx << ' ' << f.ny << "\n255\n";
  // PGM rows run top to bottom; put j = ny - 1 first so y points up.
  for (std::size_t r = 0; r < f.ny; ++r) {
    const std::size_t j = f.ny - 1 - r;
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double t = (f(i, j) - lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
  }
  auto side = open_out(path.string() + ".scale");
  side << "min " << format_double(lo) << "\nmax " << format_double(hi) << '\n';
}

void write_field_raw(const std::filesystem::path& path, const Field2D& f) {
  auto out = open_out(path, true);
  out.write(kRawMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(f.nx));
  put_u32(out, static_cast<std::uint32_t>(f.ny));
  put_u32(out, 0);
  out.write(reinterpret_cast<const char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
}

Field2D read_field_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 16> header{};
  in.read(header.data(), 16);
  if (!in || std::memcmp(header.data(), kRawMagic, 4) != 0) {
    throw std::runtime_error("bad raw snapshot header in " + path.string());
  }
  std::uint32_t nx = 0, ny = 0;
  std::memcpy(&nx, header.data() + 4, 4);
  std::memcpy(&ny, header.data() + 8, 4);
  Field2D f(nx, ny);
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated raw snapshot " + path.string());
  return f;
}

SnapshotWriter::SnapshotWriter(std::filesystem::path dir, SnapshotFormat format, bool pgm)
    : dir_(std::move(dir)), format_(format), pgm_(pgm) {
  std::filesystem::create_directories(dir_);
  auto index = open_out(dir_ / "index.csv");
  index << "time,filename\n";
  files_.push_back(dir_ / "index.csv");
}

void SnapshotWriter::write(const FieldPair& s) {
  char stem[32];
  std::snprintf(stem, sizeof stem, "%06zu", count_++);
  const char* ext = format_ == SnapshotFormat::Csv ? ".csv" : ".raw";
  std::ofstream index(dir_ / "index.csv", std::ios::app);
  for (const auto& [name, field] : {std::pair{"u", &s.u}, std::pair{"v", &s.v}}) {
    const std::string file = std::string(name) + "_" + stem + ext;
    if (format_ == SnapshotFormat::Csv) write_field_csv(dir_ / file, *field);
    else write_field_raw(dir_ / file, *field);
    files_.push_back(dir_ / file);
    index << format_double(s.time) << ',' << file << '\n';
    if (pgm_) {
      const std::string img = std::string(name) + "_" + stem + ".pgm";
      write_field_pgm(dir_ / img, *field);
      files_.push_back(dir_ / img);
      files_.push_back(dir_ / (img + ".scale"));
    }
  }
}

}  // namespace nlturing
