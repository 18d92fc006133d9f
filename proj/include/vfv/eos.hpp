// Polytropic gas closure in conservative variables (rho, m, E).
//
// States are Eigen 4-vectors ordered (rho, m_x, m_y, E). Infinite sentinels
// are IEEE infinities and are only ever compared, never fed into arithmetic.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace vfv {

template <class Scalar>
using State = Eigen::Matrix<Scalar, 4, 1>;
template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

enum Component : int { kDensity = 0, kMomentumX = 1, kMomentumY = 2, kEnergy = 3 };

/// Internal energy below this fraction of E counts as vacuum.
inline constexpr double kVacuumRatio = 1e-13;

/// Raised whenever a state leaves the admissible set (vacuum, negative
/// internal energy, non-finite values). `cell()` is -1 when no cell applies.
class InvalidState : public std::runtime_error {
 public:
  explicit InvalidState(const std::string& what, std::ptrdiff_t cell = -1)
      : std::runtime_error(cell < 0 ? "vacuum/invalid state: " + what
                                    : "vacuum/invalid state at cell " + std::to_string(cell) + ": " + what),
        cell_(cell) {}
  std::ptrdiff_t cell() const noexcept { return cell_; }

 private:
  std::ptrdiff_t cell_;
};

template <class Scalar = double>
struct GasParams {
  Scalar gamma = Scalar(1.4);
  /// Lower bound s_floor of the specific entropy S/rho (minimum principle).
  Scalar s_floor = std::numeric_limits<Scalar>::lowest();

  Scalar cv() const { return Scalar(1) / (gamma - Scalar(1)); }

  void validate() const {
    if (!(gamma > Scalar(1)) || !std::isfinite(double(gamma)))
      throw std::invalid_argument("gamma must be finite and > 1");
    if (!std::isfinite(double(s_floor))) throw std::invalid_argument("s_floor must be finite");
  }
};

template <class Scalar = double>
struct Primitive {
  Scalar rho;
  Vec2<Scalar> vel;
  Scalar pressure;
};

template <class Derived>
auto density(const Eigen::MatrixBase<Derived>& u) {
  return u(kDensity);
}
template <class Derived>
auto momentum(const Eigen::MatrixBase<Derived>& u) {
  return u.template segment<2>(kMomentumX);
}
template <class Derived>
auto energy(const Eigen::MatrixBase<Derived>& u) {
  return u(kEnergy);
}

/// |m|^2 / (2 rho) extended as a convex l.s.c. function: 0 at (0, 0),
/// +inf for rho <= 0 otherwise.
template <class Scalar>
Scalar kinetic_energy(Scalar rho, const Vec2<Scalar>& mom) {
  if (rho > Scalar(0)) return mom.squaredNorm() / (Scalar(2) * rho);
  if (rho == Scalar(0) && mom.isZero(Scalar(0))) return Scalar(0);
  return std::numeric_limits<Scalar>::infinity();
}

/// rho e = E - |m|^2/(2 rho); -inf outside the kinetic-energy domain.
template <class Scalar>
Scalar internal_energy_density(const State<Scalar>& u) {
  const Scalar k = kinetic_energy<Scalar>(density(u), momentum(u));
  if (std::isinf(double(k))) return -std::numeric_limits<Scalar>::infinity();
  return energy(u) - k;
}

/// True when rho > 0 and the internal energy clears the vacuum threshold.
template <class Scalar>
bool is_admissible(const State<Scalar>& u) {
  if (!u.allFinite() || !(density(u) > Scalar(0))) return false;
  const Scalar rho_e = internal_energy_density(u);
  return rho_e > Scalar(0) && rho_e > Scalar(kVacuumRatio) * energy(u);
}

/// p = (gamma - 1) rho e. Throws InvalidState for vacuum / non-positive
/// internal energy.
template <class Scalar>
Scalar pressure(const State<Scalar>& u, const GasParams<Scalar>& g, std::ptrdiff_t cell = -1) {
  if (!is_admissible(u)) throw InvalidState("non-positive density or internal energy", cell);
  return (g.gamma - Scalar(1)) * internal_energy_density(u);
}

/// Total entropy density S = rho log((gamma-1) rho e / rho^gamma), extended
/// as a concave u.s.c. function: 0 at (0, 0, E >= 0), -inf elsewhere
/// outside the physical domain.
template <class Scalar>
Scalar entropy(const State<Scalar>& u, const GasParams<Scalar>& g) {
  using std::log;
  const Scalar rho = density(u);
  if (rho > Scalar(0)) {
    const Scalar rho_e = energy(u) - momentum(u).squaredNorm() / (Scalar(2) * rho);
    if (rho_e > Scalar(0)) return rho * (log((g.gamma - Scalar(1)) * rho_e) - g.gamma * log(rho));
    return -std::numeric_limits<Scalar>::infinity();
  }
  if (rho == Scalar(0) && momentum(u).isZero(Scalar(0)) && energy(u) >= Scalar(0)) return Scalar(0);
  return -std::numeric_limits<Scalar>::infinity();
}

/// p(rho, S) = rho^gamma exp(S / rho); the inverse of entropy() at fixed rho.
/// At rho = 0: 0 for S <= 0 and +inf for S > 0.
template <class Scalar>
Scalar pressure_from_entropy(Scalar rho, Scalar total_entropy, const GasParams<Scalar>& g) {
  using std::exp;
  using std::pow;
  if (rho > Scalar(0)) return pow(rho, g.gamma) * exp(total_entropy / rho);
  if (rho == Scalar(0))
    return total_entropy <= Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  throw InvalidState("negative density in pressure_from_entropy");
}

/// E(rho, m, S) = |m|^2/(2 rho) + rho e(rho, S), convex in (rho, m, S).
template <class Scalar>
Scalar total_energy(Scalar rho, const Vec2<Scalar>& mom, Scalar total_entropy, const GasParams<Scalar>& g) {
  const Scalar k = kinetic_energy(rho, mom);
  const Scalar p = pressure_from_entropy(rho, total_entropy, g);
  if (std::isinf(double(k)) || std::isinf(double(p))) return std::numeric_limits<Scalar>::infinity();
  return k + p / (g.gamma - Scalar(1));
}

template <class Scalar>
Scalar sound_speed(const State<Scalar>& u, const GasParams<Scalar>& g, std::ptrdiff_t cell = -1) {
  using std::sqrt;
  return sqrt(g.gamma * pressure(u, g, cell) / density(u));
}

template <class Scalar>
State<Scalar> conservative_from_primitive(const Primitive<Scalar>& w, const GasParams<Scalar>& g) {
  if (!(w.rho > Scalar(0)) || !(w.pressure > Scalar(0)))
    throw InvalidState("primitive state needs rho > 0 and p > 0");
  State<Scalar> u;
  u(kDensity) = w.rho;
  u.template segment<2>(kMomentumX) = w.rho * w.vel;
  u(kEnergy) = w.pressure / (g.gamma - Scalar(1)) + Scalar(0.5) * w.rho * w.vel.squaredNorm();
  return u;
}

template <class Scalar>
Primitive<Scalar> primitive_from_conservative(const State<Scalar>& u, const GasParams<Scalar>& g) {
  const Scalar p = pressure(u, g);
  return {density(u), momentum(u) / density(u), p};
}

/// Minimum principle predicate S >= s_floor * rho.
template <class Scalar>
bool satisfies_entropy_floor(const State<Scalar>& u, const GasParams<Scalar>& g) {
  return entropy(u, g) >= g.s_floor * density(u);
}

}  // namespace vfv
