#include "hhdyn/wavefunction.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hhdyn/errors.hpp"

namespace hhdyn {
namespace {

template <typename T>
void put(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  in.read(bytes.data(), bytes.size());
  if (!in) throw NumericalError("snapshot: unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

void put_descriptor(std::ostream& out, const Grid1D& g) {
  if (!g.is_equidistant()) throw ConfigError("snapshot: only equidistant grids can be written");
  put(out, g.min());
  put(out, g.max());
  put(out, static_cast<double>(g.size()));
}

}  // namespace

Wavefunction::Wavefunction(ProductGrid grid)
    : grid_(std::move(grid)), shape_(grid_.shape()), amplitudes_(shape_.size(), cplx{0.0, 0.0}) {}

double Wavefunction::norm_squared() const {
  const std::size_t n1 = shape_.n[1], n2 = shape_.n[2];
  double total = 0.0;
  for (std::size_t ir = 0; ir < shape_.n[0]; ++ir) {
    double slab = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      const cplx* row = amplitudes_.data() + shape_.index(ir, i, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < n2; ++j) acc += std::norm(row[j]) * grid_.z2.weight(j);
      slab += acc * grid_.z1.weight(i);
    }
    total += slab * grid_.r_weight(ir);
  }
  return total;
}

double Wavefunction::norm() const { return std::sqrt(norm_squared()); }

void Wavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero or non-finite wavefunction");
  const double inv = 1.0 / n;
  for (auto& a : amplitudes_) a *= inv;
}

bool Wavefunction::all_finite() const {
  for (const auto& a : amplitudes_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

cplx Wavefunction::inner(const Wavefunction& other) const {
  if (!(other.shape_ == shape_)) throw ConfigError("inner product of wavefunctions on different grids");
  const std::size_t n1 = shape_.n[1], n2 = shape_.n[2];
  cplx total{0.0, 0.0};
  for (std::size_t ir = 0; ir < shape_.n[0]; ++ir) {
    cplx slab{0.0, 0.0};
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t base = shape_.index(ir, i, 0);
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < n2; ++j)
        acc += std::conj(amplitudes_[base + j]) * other.amplitudes_[base + j] * grid_.z2.weight(j);
      slab += acc * grid_.z1.weight(i);
    }
    total += slab * grid_.r_weight(ir);
  }
  return total;
}

void write_snapshot(const Wavefunction& psi, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("snapshot: cannot open " + path.string() + " for writing");
  const auto& g = psi.grid();
  const Shape3 s = psi.shape();
  out.write("HHWF", 4);
  put(out, kSnapshotVersion);
  for (auto n : s.n) put(out, static_cast<std::uint32_t>(n));
  if (g.r) {
    put_descriptor(out, *g.r);
  } else {
    put(out, g.frozen_r);
    put(out, g.frozen_r);
    put(out, 1.0);
  }
  put_descriptor(out, g.z1);
  put_descriptor(out, g.z2);
  for (const auto& a : psi.data()) {
    put(out, a.real());
    put(out, a.imag());
  }
  if (!out) throw NumericalError("snapshot: write to " + path.string() + " failed");
}

Wavefunction read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("snapshot: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HHWF", 4) != 0) throw ConfigError("snapshot: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) throw ConfigError("snapshot: unsupported version " + std::to_string(version));
  std::array<std::uint32_t, 3> n{};
  for (auto& v : n) v = get<std::uint32_t>(in);
  std::array<std::array<double, 3>, 3> desc{};
  for (auto& d : desc)
    for (auto& v : d) v = get<double>(in);

  auto axis = [&](int a, AxisLabel label) {
    if (static_cast<std::uint32_t>(desc[a][2]) != n[a]) throw ConfigError("snapshot: inconsistent extents");
    return Grid1D::equidistant(label, desc[a][0], desc[a][1], n[a]);
  };
  ProductGrid grid;
  if (n[0] == 1 && desc[0][0] == desc[0][1]) {
    grid.frozen_r = desc[0][0];
  } else {
    grid.r = axis(0, AxisLabel::R);
  }
  grid.z1 = axis(1, AxisLabel::Z1);
  grid.z2 = axis(2, AxisLabel::Z2);

  Wavefunction psi(std::move(grid));
  for (auto& a : psi.data()) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    a = {re, im};
  }
  return psi;
}

}  // namespace hhdyn
