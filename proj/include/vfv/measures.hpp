// Empirical Young measures over a hierarchy and 1D Wasserstein-1 distances.
#pragma once

#include "vfv/diagnostics.hpp"
#include "vfv/initdata.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

namespace vfv {

/// Weighted atoms in (rho, m_x, m_y, E) state space.
template <class Scalar = double>
struct EmpiricalMeasure {
  StateArray<Scalar> atoms;
  ScalarArray<Scalar> weights;

  Index size() const { return atoms.cols(); }

  /// Pushforward under the linear map x -> direction . x.
  std::vector<Scalar> project(const State<Scalar>& direction) const {
    std::vector<Scalar> out(static_cast<std::size_t>(size()));
    for (Index k = 0; k < size(); ++k) out[std::size_t(k)] = direction.dot(atoms.col(k));
    return out;
  }
  std::vector<Scalar> component(int comp) const {
    State<Scalar> e = State<Scalar>::Zero();
    e(comp) = 1;
    return project(e);
  }
};

/// One atom per member, uniform weights; duplicates are kept.
template <class Scalar>
EmpiricalMeasure<Scalar> young_measure_at(const CesaroEnsemble<Scalar>& ens, Index cell) {
  if (cell < 0 || cell >= ens.mesh.cell_count()) throw std::out_of_range("cell index out of range");
  EmpiricalMeasure<Scalar> mu;
  mu.atoms.resize(4, ens.size());
  for (Index k = 0; k < ens.size(); ++k) mu.atoms.col(k) = ens.members[std::size_t(k)].state.cells.col(cell);
  mu.weights = ScalarArray<Scalar>::Constant(ens.size(), Scalar(1) / Scalar(ens.size()));
  return mu;
}

/// Exact W1 between two weighted point sets on the line: integral of
/// |F_a - F_b| over the merged support.
template <class Scalar>
Scalar wasserstein1_scalar(const std::vector<Scalar>& xa, const std::vector<Scalar>& wa, const std::vector<Scalar>& xb,
                           const std::vector<Scalar>& wb) {
  if (xa.empty() || xb.empty()) throw std::invalid_argument("W1 needs nonempty measures");
  if (xa.size() != wa.size() || xb.size() != wb.size()) throw std::invalid_argument("atom/weight size mismatch");
  struct Event {
    Scalar x;
    Scalar dw;  // +w for a, -w for b
  };
  std::vector<Event> ev;
  ev.reserve(xa.size() + xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i) ev.push_back({xa[i], wa[i]});
  for (std::size_t i = 0; i < xb.size(); ++i) ev.push_back({xb[i], -wb[i]});
  std::sort(ev.begin(), ev.end(), [](const Event& l, const Event& r) { return l.x < r.x; });
  Scalar cdf_gap = 0, dist = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    cdf_gap += ev[i].dw;
    dist += std::abs(cdf_gap) * (ev[i + 1].x - ev[i].x);
  }
  return dist;
}

template <class Scalar>
Scalar wasserstein1_scalar(const EmpiricalMeasure<Scalar>& a, const EmpiricalMeasure<Scalar>& b,
                           const State<Scalar>& direction) {
  const std::vector<Scalar> wa(a.weights.data(), a.weights.data() + a.size());
  const std::vector<Scalar> wb(b.weights.data(), b.weights.data() + b.size());
  return wasserstein1_scalar(a.project(direction), wa, b.project(direction), wb);
}

/// Which scalar projection of state space the distance field uses.
struct ComponentSelector {
  int component = kDensity;
};
/// Average of W1 over `directions` fixed pseudo-random unit directions in R^4.
struct SlicedSelector {
  int directions = 16;
  std::uint64_t seed = 7;
};
using MeasureSelector = std::variant<ComponentSelector, SlicedSelector>;

inline std::vector<State<double>> slicing_directions(const SlicedSelector& s) {
  SplitMix64 rng(s.seed);
  std::vector<State<double>> dirs;
  while (int(dirs.size()) < s.directions) {
    State<double> d;
    for (int k = 0; k < 4; ++k) d(k) = 2 * rng.uniform() - 1;
    const double nrm = d.norm();
    if (nrm > 1e-3 && nrm <= 1) dirs.push_back(d / nrm);
  }
  return dirs;
}

template <class Scalar = double>
struct DistanceField {
  Mesh mesh;
  ScalarArray<Scalar> dist;
  Scalar aggregate = 0;  // (sum dist^q h^2)^(1/q)
  double q = 1;
};

/// Per-cell W1 between the Young measures of two ensembles on one mesh.
template <class Scalar>
DistanceField<Scalar> measure_distance_field(const CesaroEnsemble<Scalar>& a, const CesaroEnsemble<Scalar>& b,
                                             const MeasureSelector& selector = ComponentSelector{}, double q = 1) {
  if (!(a.mesh == b.mesh)) throw std::invalid_argument("ensembles live on different meshes");
  if (!same_time(double(a.time), double(b.time))) throw std::invalid_argument("ensembles are at different times");
  if (!(q >= 1)) throw std::invalid_argument("aggregate exponent q must be >= 1");
  std::vector<State<Scalar>> dirs;
  if (const auto* c = std::get_if<ComponentSelector>(&selector)) {
    State<Scalar> e = State<Scalar>::Zero();
    e(c->component) = 1;
    dirs.push_back(e);
  } else {
    for (const auto& d : slicing_directions(std::get<SlicedSelector>(selector))) dirs.push_back(d.cast<Scalar>());
  }
  DistanceField<Scalar> out{a.mesh, ScalarArray<Scalar>(a.mesh.cell_count()), 0, q};
  const Scalar h2 = a.mesh.template h<Scalar>() * a.mesh.template h<Scalar>();
  Scalar acc = 0;
  for (Index c = 0; c < a.mesh.cell_count(); ++c) {
    const auto ma = young_measure_at(a, c), mb = young_measure_at(b, c);
    Scalar d = 0;
    for (const auto& dir : dirs) d += wasserstein1_scalar(ma, mb, dir);
    d /= Scalar(dirs.size());
    out.dist(c) = d;
    acc += std::pow(d, Scalar(q)) * h2;
  }
  out.aggregate = std::pow(acc, Scalar(1 / q));
  return out;
}

}  // namespace vfv
