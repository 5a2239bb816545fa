#pragma once

// ZonalField persistence.
//
// Text form: one line "k re im" per coefficient, '#' starts a comment.
// Binary form (little-endian, columnar):
//   bytes 0..7   magic "ZOLLZF01"
//   u32          format version (1)
//   u32          reserved (0)
//   u64          count n = K+1
//   n x i64      degrees k (must be 0..K in order)
//   n x f64      real parts
//   n x f64      imaginary parts

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoll/sphere.hpp"

namespace zoll {

static_assert(std::endian::native == std::endian::little,
              "binary field I/O assumes a little-endian host");

inline void write_text(std::ostream& os, const ZonalField& f) {
  os << "# k re im\n" << std::setprecision(17);
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) {
    os << k << ' ' << f[k].real() << ' ' << f[k].imag() << '\n';
  }
}

inline ZonalField read_text(std::istream& is) {
  std::vector<cplx> coeffs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::int64_t k;
    double re, im;
    if (!(ls >> k)) continue;  // blank line
    if (!(ls >> re >> im)) {
      throw std::runtime_error("zonal text line " + std::to_string(lineno) + ": expected 'k re im'");
    }
    if (k != static_cast<std::int64_t>(coeffs.size())) {
      throw std::runtime_error("zonal text line " + std::to_string(lineno) +
                               ": degrees must be listed as 0, 1, 2, ...");
    }
    coeffs.emplace_back(re, im);
  }
  if (coeffs.empty()) throw std::runtime_error("zonal text: no coefficients");
  return ZonalField(std::move(coeffs));
}

namespace detail {
inline constexpr char kFieldMagic[8] = {'Z', 'O', 'L', 'L', 'Z', 'F', '0', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw std::runtime_error("zonal binary: truncated input");
  }
  return v;
}
}  // namespace detail

inline void write_binary(std::ostream& os, const ZonalField& f) {
  os.write(detail::kFieldMagic, 8);
  detail::put<std::uint32_t>(os, 1);
  detail::put<std::uint32_t>(os, 0);
  detail::put<std::uint64_t>(os, f.coeffs.size());
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) detail::put<std::int64_t>(os, k);
  for (const auto& c : f.coeffs) detail::put<double>(os, c.real());
  for (const auto& c : f.coeffs) detail::put<double>(os, c.imag());
}

inline ZonalField read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, detail::kFieldMagic, 8) != 0) {
    throw std::runtime_error("zonal binary: bad magic");
  }
  if (detail::get<std::uint32_t>(is) != 1) throw std::runtime_error("zonal binary: unsupported version");
  (void)detail::get<std::uint32_t>(is);
  const auto n = detail::get<std::uint64_t>(is);
  if (n == 0 || n > (std::uint64_t{1} << 32)) throw std::runtime_error("zonal binary: bad count");
  for (std::uint64_t i = 0; i < n; ++i) {
    if (detail::get<std::int64_t>(is) != static_cast<std::int64_t>(i)) {
      throw std::runtime_error("zonal binary: degree column out of order");
    }
  }
  std::vector<double> re(n), im(n);
  for (auto& x : re) x = detail::get<double>(is);
  for (auto& x : im) x = detail::get<double>(is);
  std::vector<cplx> c(n);
  for (std::uint64_t i = 0; i < n; ++i) c[i] = {re[i], im[i]};
  return ZonalField(std::move(c));
}

inline void save_field(const std::string& path, const ZonalField& f, bool binary = true) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  binary ? write_binary(os, f) : write_text(os, f);
  if (!os) throw std::runtime_error("write failed: " + path);
}

/// Loads either format, sniffing the magic bytes.
inline ZonalField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8] = {};
  is.read(magic, 8);
  const bool binary = is.gcount() == 8 && std::memcmp(magic, detail::kFieldMagic, 8) == 0;
  is.clear();
  is.seekg(0);
  return binary ? read_binary(is) : read_text(is);
}

}  // namespace zoll
