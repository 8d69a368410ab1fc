#include "phdisk/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace phdisk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw Error("PHD1: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  return os;
}

struct RawGrid {
  std::uint32_t n_r = 0;
  std::uint32_t n_theta = 0;
  std::vector<cplx> values;
};

cplx stored(cplx v, bool masked) {
  return masked ? cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()) : v;
}

void write_raw_phd1(const std::filesystem::path& path, std::uint32_t n_r, std::uint32_t n_theta,
                    const std::vector<cplx>& values) {
  auto os = open_out(path, std::ios::binary);
  os.write("PHD1", 4);
  put_le<std::uint32_t>(os, n_r);
  put_le<std::uint32_t>(os, n_theta);
  for (const auto& v : values) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

RawGrid read_raw_phd1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open '" + path.string() + "'");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "PHD1", 4) != 0)
    throw InvalidArgument("'" + path.string() + "' is not a PHD1 file");
  RawGrid g;
  g.n_r = get_le<std::uint32_t>(is);
  g.n_theta = get_le<std::uint32_t>(is);
  const std::size_t n = static_cast<std::size_t>(g.n_r) * g.n_theta;
  g.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    g.values[i] = {re, im};
  }
  return g;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

RawGrid read_raw_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,theta,re,im", 0) != 0)
    throw InvalidArgument("'" + path.string() + "': expected CSV header r,theta,re,im");
  std::vector<double> rs;
  std::vector<cplx> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::array<double, 4> row{};
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ls, cell, ',')) throw InvalidArgument("'" + path.string() + "': malformed row: " + line);
      try {
        row[c] = cell == "nan" || cell == "-nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("'" + path.string() + "': malformed number '" + cell + "'");
      }
    }
    rs.push_back(row[0]);
    vals.push_back({row[2], row[3]});
  }
  if (vals.empty()) throw InvalidArgument("'" + path.string() + "': no data rows");
  // Rows are grouped by radius; the ring length is the run of the first radius.
  std::size_t n_theta = 0;
  while (n_theta < rs.size() && rs[n_theta] == rs[0]) ++n_theta;
  if (vals.size() % n_theta != 0) throw InvalidArgument("'" + path.string() + "': ragged rings");
  RawGrid g;
  g.n_theta = static_cast<std::uint32_t>(n_theta);
  g.n_r = static_cast<std::uint32_t>(vals.size() / n_theta);
  g.values = std::move(vals);
  return g;
}

RawGrid read_raw(const std::filesystem::path& path) {
  return format_for(path) == FileFormat::csv ? read_raw_csv(path) : read_raw_phd1(path);
}

std::vector<std::uint8_t> mask_of(const std::vector<cplx>& values) {
  std::vector<std::uint8_t> mask;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      if (mask.empty()) mask.assign(values.size(), 0);
      mask[i] = 1;
    }
  return mask;
}

}  // namespace

FileFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FileFormat::csv : FileFormat::phd1;
}

void write_phd1(const std::filesystem::path& path, const GridFunction& f) {
  std::vector<cplx> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = stored(f.values()[i], f.masked_flat(i));
  write_raw_phd1(path, f.grid().n_r(), f.grid().n_theta(), v);
}

void write_phd1(const std::filesystem::path& path, const BoundaryFunction& b) {
  std::vector<cplx> v(b.size());
  for (int k = 0; k < b.size(); ++k) v[k] = stored(b[k], b.masked(k));
  write_raw_phd1(path, 1, b.size(), v);
}

void write_csv(const std::filesystem::path& path, const GridFunction& f) {
  auto os = open_out(path);
  os << "r,theta,re,im\n";
  const auto& g = f.grid();
  for (int j = 0; j < g.n_r(); ++j)
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx v = stored(f(j, k), f.masked(j, k));
      os << fmt(g.radius(j)) << ',' << fmt(g.theta(k)) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const BoundaryFunction& b) {
  auto os = open_out(path);
  os << "r,theta,re,im\n";
  for (int k = 0; k < b.size(); ++k) {
    const cplx v = stored(b[k], b.masked(k));
    os << "1," << fmt(b.theta(k)) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
  }
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& f) {
  if (format_for(path) == FileFormat::csv)
    write_csv(path, f);
  else
    write_phd1(path, f);
}

void write_boundary_function(const std::filesystem::path& path, const BoundaryFunction& b) {
  if (format_for(path) == FileFormat::csv)
    write_csv(path, b);
  else
    write_phd1(path, b);
}

GridFunction read_grid_function(const std::filesystem::path& path) {
  auto raw = read_raw(path);
  auto grid = make_grid(static_cast<int>(raw.n_theta), static_cast<int>(raw.n_r));
  auto mask = mask_of(raw.values);
  return GridFunction(grid, std::move(raw.values), std::move(mask));
}

BoundaryFunction read_boundary_function(const std::filesystem::path& path) {
  auto raw = read_raw(path);
  if (raw.n_r != 1)
    throw InvalidArgument("'" + path.string() + "' holds " + std::to_string(raw.n_r) +
                          " rings; boundary data needs exactly one");
  auto mask = mask_of(raw.values);
  return BoundaryFunction(std::move(raw.values), std::move(mask));
}

void emit_slice(const GridFunction& f, const Slice& slice, const std::filesystem::path& path) {
  const auto& g = f.grid();
  std::vector<std::pair<double, std::pair<int, int>>> rows;
  if (slice.kind == Slice::Kind::radius) {
    const int j = g.radius_index(slice.value);
    for (int k = 0; k < g.n_theta(); ++k) rows.push_back({g.theta(k), {j, k}});
  } else {
    double t = std::fmod(slice.value, kTwoPi);
    if (t < 0) t += kTwoPi;
    const double pos = t * g.n_theta() / kTwoPi;
    const long k = std::lround(pos);
    if (std::abs(pos - static_cast<double>(k)) > 1e-9)
      throw InvalidArgument("emit_slice: angle " + fmt(slice.value) + " is not a grid angle");
    for (int j = 0; j < g.n_r(); ++j) rows.push_back({g.radius(j), {j, static_cast<int>(k % g.n_theta())}});
  }
  auto os = open_out(path);
  os << "coordinate,re,im,abs,masked\n";
  for (const auto& [coord, node] : rows) {
    const auto [j, k] = node;
    const bool m = f.masked(j, k) || !std::isfinite(std::abs(f(j, k)));
    const cplx v = f(j, k);
    os << fmt(coord) << ',';
    if (m)
      os << "nan,nan,nan,masked\n";
    else
      os << fmt(v.real()) << ',' << fmt(v.imag()) << ',' << fmt(std::abs(v)) << ",\n";
  }
}

}  // namespace phdisk
