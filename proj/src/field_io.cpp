#include "stiff/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "stiff/errors.hpp"

namespace stiff {
namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

void put(std::ostream& os, std::uint64_t v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error("truncated field file");
  return to_little(v);
}

}  // namespace

void write_field_binary(const SplitField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  put(os, static_cast<std::uint64_t>(f.grid.nx));
  put(os, static_cast<std::uint64_t>(f.grid.ny));
  put(os, std::bit_cast<std::uint64_t>(f.grid.Lx));
  put(os, std::bit_cast<std::uint64_t>(f.grid.Ly));
  put(os, static_cast<std::uint64_t>(kFieldFormatVersion));
  for (Side s : {Side::plus, Side::minus}) {
    const auto& h = f.half(s);
    for (int j = 0; j <= f.grid.ny; ++j)
      for (int i = 0; i <= f.grid.nx; ++i) put(os, std::bit_cast<std::uint64_t>(h(j, i)));
  }
}

SplitField read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  const auto nx = static_cast<int>(get(is));
  const auto ny = static_cast<int>(get(is));
  const double lx = std::bit_cast<double>(get(is));
  const double ly = std::bit_cast<double>(get(is));
  const auto version = static_cast<long long>(get(is));
  if (version != kFieldFormatVersion) throw Error("unsupported field format version");
  SplitField f(make_grid(lx, ly, nx, ny));
  for (Side s : {Side::plus, Side::minus}) {
    auto& h = f.half(s);
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) h(j, i) = std::bit_cast<double>(get(is));
  }
  return f;
}

void write_field_csv(const SplitField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "x1,x2,side,value\n" << std::setprecision(17);
  for (Side s : {Side::plus, Side::minus}) {
    const char* tag = s == Side::plus ? "+" : "-";
    for (int j = 0; j <= f.grid.ny; ++j)
      for (int i = 0; i <= f.grid.nx; ++i)
        os << f.grid.x1(i) << ',' << f.x2(s, j) << ',' << tag << ',' << f.half(s)(j, i) << '\n';
  }
}

}  // namespace stiff
