// Uniform square mesh on [0,1]^2, face enumeration and nested restriction.
#pragma once

#include "vfv/eos.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vfv {

using Index = std::ptrdiff_t;

template <class Scalar>
using StateArray = Eigen::Matrix<Scalar, 4, Eigen::Dynamic>;
template <class Scalar>
using ScalarArray = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Boundary { periodic, reflecting };

inline const char* to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "reflecting"; }

class Mesh {
 public:
  explicit Mesh(Index n = 4, Boundary bc = Boundary::periodic) : n_(n), bc_(bc) {
    if (n < 4 || (n & (n - 1)) != 0)
      throw std::invalid_argument("mesh size must be a power of two >= 4, got " + std::to_string(n));
  }

  Index n() const { return n_; }
  Boundary bc() const { return bc_; }
  Index cell_count() const { return n_ * n_; }

  template <class Scalar = double>
  Scalar h() const {
    return Scalar(1) / Scalar(n_);
  }

  /// Row-major cell index: i runs along x, j along y.
  Index index(Index i, Index j) const { return j * n_ + i; }

  /// Periodic wraps n^2 vertical + n^2 horizontal faces; reflecting adds the
  /// n boundary faces per row/column.
  Index face_count() const { return bc_ == Boundary::periodic ? 2 * n_ * n_ : 2 * n_ * (n_ + 1); }

  bool operator==(const Mesh& o) const { return n_ == o.n_ && bc_ == o.bc_; }

 private:
  Index n_;
  Boundary bc_;
};

/// Marks the mirror-ghost side of a reflecting boundary face.
inline constexpr Index kGhost = -1;

template <class Scalar = double>
struct FaceNeighbors {
  Index left;   // cell or kGhost
  Index right;  // cell or kGhost
  Vec2<Scalar> normal;  // unit normal pointing from left to right
};

/// Vertical faces come first (x-normals), then horizontal faces. Under
/// periodic bc face f < n^2 sits on the right of cell f; under reflecting bc
/// each row carries n+1 faces, the first and last touching a ghost.
template <class Scalar = double>
FaceNeighbors<Scalar> face_neighbors(const Mesh& mesh, Index face) {
  const Index n = mesh.n();
  if (face < 0 || face >= mesh.face_count())
    throw std::out_of_range("face index " + std::to_string(face) + " out of range");
  if (mesh.bc() == Boundary::periodic) {
    if (face < n * n) {
      const Index i = face % n, j = face / n;
      return {mesh.index(i, j), mesh.index((i + 1) % n, j), Vec2<Scalar>(1, 0)};
    }
    const Index f = face - n * n;
    const Index i = f % n, j = f / n;
    return {mesh.index(i, j), mesh.index(i, (j + 1) % n), Vec2<Scalar>(0, 1)};
  }
  const Index per_dir = n * (n + 1);
  if (face < per_dir) {
    const Index k = face % (n + 1), j = face / (n + 1);  // face k sits left of cell k
    const Index left = k == 0 ? kGhost : mesh.index(k - 1, j);
    const Index right = k == n ? kGhost : mesh.index(k, j);
    return {left, right, Vec2<Scalar>(1, 0)};
  }
  const Index f = face - per_dir;
  const Index k = f % (n + 1), i = f / (n + 1);
  const Index left = k == 0 ? kGhost : mesh.index(i, k - 1);
  const Index right = k == n ? kGhost : mesh.index(i, k);
  return {left, right, Vec2<Scalar>(0, 1)};
}

/// Mirror image of `u` across a wall with unit normal `normal`.
template <class Scalar>
State<Scalar> mirror_state(const State<Scalar>& u, const Vec2<Scalar>& normal) {
  State<Scalar> g = u;
  const Scalar mn = momentum(u).dot(normal);
  g.template segment<2>(kMomentumX) -= Scalar(2) * mn * normal;
  return g;
}

template <class Scalar = double>
Vec2<Scalar> cell_center(const Mesh& mesh, Index i, Index j) {
  if (i < 0 || j < 0 || i >= mesh.n() || j >= mesh.n())
    throw std::out_of_range("cell (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  const Scalar h = mesh.h<Scalar>();
  return {(Scalar(i) + Scalar(0.5)) * h, (Scalar(j) + Scalar(0.5)) * h};
}

/// Piecewise-constant conservative state at one time level.
template <class Scalar = double>
struct ConservativeField {
  Mesh mesh;
  Scalar time = Scalar(0);
  StateArray<Scalar> cells;  // 4 x n^2, column = cell

  ConservativeField() = default;
  ConservativeField(const Mesh& m, Scalar t) : mesh(m), time(t), cells(4, m.cell_count()) { cells.setZero(); }

  static ConservativeField uniform(const Mesh& m, const State<Scalar>& u, Scalar t = Scalar(0)) {
    ConservativeField f(m, t);
    f.cells.colwise() = u;
    return f;
  }

  State<Scalar> cell(Index i, Index j) const { return cells.col(mesh.index(i, j)); }

  /// Integrals of (rho, m_x, m_y, E) over the domain.
  State<Scalar> totals() const {
    const Scalar h = mesh.h<Scalar>();
    return cells.rowwise().sum() * (h * h);
  }

  /// Throws InvalidState for the first inadmissible cell.
  void validate() const {
    for (Index c = 0; c < cells.cols(); ++c)
      if (!is_admissible<Scalar>(cells.col(c))) throw InvalidState("field validation failed", c);
  }
};

/// Per-cell total entropy S(rho, m, E).
template <class Scalar>
ScalarArray<Scalar> entropy_field(const ConservativeField<Scalar>& f, const GasParams<Scalar>& g) {
  ScalarArray<Scalar> s(f.cells.cols());
  for (Index c = 0; c < f.cells.cols(); ++c) s(c) = entropy<Scalar>(f.cells.col(c), g);
  return s;
}

template <class Scalar>
Scalar total_entropy(const ConservativeField<Scalar>& f, const GasParams<Scalar>& g) {
  const Scalar h = f.mesh.template h<Scalar>();
  return entropy_field(f, g).sum() * h * h;
}

namespace detail {

/// One factor-two coarsening of a row-major n x n array with `rows` components.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> halve(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& fine, Index n) {
  const Index nc = n / 2;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coarse(fine.rows(), nc * nc);
  for (Index j = 0; j < nc; ++j)
    for (Index i = 0; i < nc; ++i) {
      const Index a = (2 * j) * n + 2 * i, b = (2 * j + 1) * n + 2 * i;
      coarse.col(j * nc + i) = ((fine.col(a) + fine.col(a + 1)) + (fine.col(b) + fine.col(b + 1))) * Scalar(0.25);
    }
  return coarse;
}

inline void check_nested(const Mesh& fine, const Mesh& coarse) {
  if (coarse.n() > fine.n() || fine.n() % coarse.n() != 0)
    throw std::invalid_argument("meshes are not nested: " + std::to_string(fine.n()) + " -> " +
                                std::to_string(coarse.n()));
}

}  // namespace detail

/// Block average of per-cell data (`rows` components per column) from mesh
/// size n_fine onto n_coarse. Implemented as repeated factor-two halving so
/// restrict(restrict(f)) and the direct restriction agree bit for bit.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> restrict_cells(
    const Eigen::MatrixBase<Derived>& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
  using Scalar = typename Derived::Scalar;
  detail::check_nested(fine_mesh, coarse_mesh);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = fine;
  for (Index n = fine_mesh.n(); n > coarse_mesh.n(); n /= 2) out = detail::halve<Scalar>(out, n);
  return out;
}

template <class Scalar>
ConservativeField<Scalar> restrict_to(const ConservativeField<Scalar>& fine, const Mesh& coarse_mesh) {
  ConservativeField<Scalar> out(coarse_mesh, fine.time);
  out.cells = restrict_cells(fine.cells, fine.mesh, coarse_mesh);
  return out;
}

template <class Scalar>
ScalarArray<Scalar> restrict_scalar(const ScalarArray<Scalar>& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
  return restrict_cells(fine.transpose(), fine_mesh, coarse_mesh).transpose();
}

}  // namespace vfv
