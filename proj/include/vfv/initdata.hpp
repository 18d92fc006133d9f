// Kelvin-Helmholtz shear-layer data with seeded interface perturbations.
#pragma once

#include "vfv/eos.hpp"
#include "vfv/grid.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace vfv {

/// SplitMix64 (Steele, Lea, Flood). Constants are fixed so every port of
/// this generator draws the same KH coefficients from the same seed.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ULL;
  static constexpr std::uint64_t kMix2 = 0x94D049BB133111EBULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kIncrement);
    z = (z ^ (z >> 30)) * kMix1;
    z = (z ^ (z >> 27)) * kMix2;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// a[j][k], b[j][k] for interfaces j = 0 (lower), 1 (upper), modes k = 1..m.
struct KhCoefficients {
  std::array<std::vector<double>, 2> a;
  std::array<std::vector<double>, 2> b;
};

/// For each interface: m uniforms for a (normalized to sum 1), then m
/// uniforms scaled to [0, 2 pi) for b.
inline KhCoefficients draw_coefficients(std::uint64_t seed, int modes) {
  if (modes < 1) throw std::invalid_argument("KH needs at least one mode");
  SplitMix64 rng(seed);
  KhCoefficients c;
  for (int j = 0; j < 2; ++j) {
    c.a[j].resize(modes);
    c.b[j].resize(modes);
    double sum = 0;
    for (auto& a : c.a[j]) sum += (a = rng.uniform());
    if (sum == 0) throw std::runtime_error("degenerate KH amplitude draw");
    for (auto& a : c.a[j]) a /= sum;
    for (auto& b : c.b[j]) b = 2 * std::numbers::pi * rng.uniform();
  }
  return c;
}

struct KhSpec {
  int modes = 10;
  double amplitude = 0.01;  // interface perturbation size
  double j1 = 0.25;
  double j2 = 0.75;
  std::uint64_t seed = 42;
  std::optional<KhCoefficients> coeffs;  // overrides the PRNG when set

  KhCoefficients coefficients() const { return coeffs ? *coeffs : draw_coefficients(seed, modes); }
};

/// Y_j(x) = sum_k a_j^k cos(b_j^k + 2 k pi x).
inline double kh_profile(const KhCoefficients& c, int j, double x) {
  double y = 0;
  for (std::size_t k = 0; k < c.a[j].size(); ++k)
    y += c.a[j][k] * std::cos(c.b[j][k] + 2.0 * double(k + 1) * std::numbers::pi * x);
  return y;
}

/// I_j(x) = J_j + amplitude * Y_j(x); j = 0 is the lower interface.
inline double kh_interface(const KhSpec& spec, const KhCoefficients& c, int j, double x) {
  if (j != 0 && j != 1) throw std::out_of_range("interface index must be 0 or 1");
  return (j == 0 ? spec.j1 : spec.j2) + spec.amplitude * kh_profile(c, j, x);
}

inline double kh_interface(const KhSpec& spec, int j, double x) { return kh_interface(spec, spec.coefficients(), j, x); }

/// Inner strip (rho, u, v, p) = (2, -0.5, 0, 2.5), outer (1, 0.5, 0, 2.5).
template <class Scalar = double>
Primitive<Scalar> kh_inner_state() {
  return {Scalar(2), Vec2<Scalar>(Scalar(-0.5), Scalar(0)), Scalar(2.5)};
}
template <class Scalar = double>
Primitive<Scalar> kh_outer_state() {
  return {Scalar(1), Vec2<Scalar>(Scalar(0.5), Scalar(0)), Scalar(2.5)};
}

/// Samples the KH data at cell centres: inner state where I_1(x) <= y <= I_2(x).
template <class Scalar = double>
ConservativeField<Scalar> kh_initial_field(const KhSpec& spec, const Mesh& mesh, const GasParams<Scalar>& g) {
  const KhCoefficients c = spec.coefficients();
  const State<Scalar> inner = conservative_from_primitive(kh_inner_state<Scalar>(), g);
  const State<Scalar> outer = conservative_from_primitive(kh_outer_state<Scalar>(), g);
  ConservativeField<Scalar> f(mesh, Scalar(0));
  for (Index i = 0; i < mesh.n(); ++i) {
    const Vec2<double> xc = cell_center<double>(mesh, i, 0);
    const double lo = kh_interface(spec, c, 0, xc.x());
    const double hi = kh_interface(spec, c, 1, xc.x());
    for (Index j = 0; j < mesh.n(); ++j) {
      const double y = cell_center<double>(mesh, i, j).y();
      f.cells.col(mesh.index(i, j)) = (lo <= y && y <= hi) ? inner : outer;
    }
  }
  return f;
}

template <class Scalar = double>
ConservativeField<Scalar> uniform_field(const Mesh& mesh, const Primitive<Scalar>& w, const GasParams<Scalar>& g) {
  return ConservativeField<Scalar>::uniform(mesh, conservative_from_primitive(w, g));
}

}  // namespace vfv
