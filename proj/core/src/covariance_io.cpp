#include "quasifree/covariance_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "quasifree/errors.hpp"

namespace quasifree {

namespace {

constexpr std::array<char, 5> kMagic = {'Q', 'L', 'C', 'V', '1'};

static_assert(std::endian::native == std::endian::little, "binary covariance I/O assumes a little-endian host");

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_covariance_csv(const std::filesystem::path& path, const Covariance& gamma) {
  auto out = open_out(path);
  out << "x,y,re,im\n" << std::setprecision(17);
  const int L = gamma.size();
  for (int x = 0; x < L; ++x)
    for (int y = x; y < L; ++y) {
      const cplx v = gamma(x, y);
      out << x + 1 << ',' << y + 1 << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

Covariance read_covariance_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,re,im", 0) != 0) {
    throw Error(path.string() + ": expected header x,y,re,im");
  }
  struct Entry {
    int x, y;
    cplx v;
  };
  std::vector<Entry> entries;
  int L = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Entry e{};
    double re = 0.0, im = 0.0;
    if (!(fields >> e.x >> e.y >> re >> im) || e.x < 1 || e.y < 1) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    e.v = {re, im};
    L = std::max({L, e.x, e.y});
    entries.push_back(e);
  }
  if (L == 0) throw Error(path.string() + ": no entries");
  ComplexMatrix m = ComplexMatrix::Zero(L, L);
  for (const auto& e : entries) {
    m(e.x - 1, e.y - 1) = e.v;
    if (e.x != e.y) m(e.y - 1, e.x - 1) = std::conj(e.v);
  }
  return Covariance(std::move(m));
}

void write_covariance_binary(const std::filesystem::path& path, const Covariance& gamma) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic.data(), kMagic.size());
  const auto L = static_cast<std::uint32_t>(gamma.size());
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  std::vector<float> row(2 * static_cast<std::size_t>(L));
  for (std::uint32_t x = 0; x < L; ++x) {
    for (std::uint32_t y = 0; y < L; ++y) {
      const cplx v = gamma.matrix()(x, y);
      row[2 * y] = static_cast<float>(v.real());
      row[2 * y + 1] = static_cast<float>(v.imag());
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Covariance read_covariance_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::array<char, 5> magic{};
  std::uint32_t L = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  if (!in || magic != kMagic) throw Error(path.string() + ": not a QLCV1 file");
  if (L == 0) throw Error(path.string() + ": L = 0");
  ComplexMatrix m(L, L);
  std::vector<float> row(2 * static_cast<std::size_t>(L));
  for (std::uint32_t x = 0; x < L; ++x) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw Error(path.string() + ": truncated");
    for (std::uint32_t y = 0; y < L; ++y) m(x, y) = cplx(row[2 * y], row[2 * y + 1]);
  }
  // float32 storage: Hermiticity holds only to single precision.
  return Covariance(std::move(m), 1e-6);
}

Covariance read_covariance(const std::filesystem::path& path) {
  std::array<char, 5> magic{};
  {
    auto in = open_in(path, std::ios::binary);
    in.read(magic.data(), magic.size());
  }
  return magic == kMagic ? read_covariance_binary(path) : read_covariance_csv(path);
}

}  // namespace quasifree
