#pragma once

#include <cmath>
#include <stdexcept>

#include "ringmag/types.hpp"

namespace ringmag {

struct RadialGrid {
  double spacing = 0.01;
  double margin = 8.0;  // box extends to R + margin
};

// Radial ground-state data of one ring, V(r) = (R - r)^2 / 2.
// psi0 is sampled on cell centers r_i = (i + 1/2) h and normalized so that
// 2 pi h sum r_i psi0_i^2 = 1 (the planar norm).
struct SingleRingSolution {
  double R = 0.0;
  RadialGrid grid;
  VectorXd r;
  VectorXd psi0;
  double E0 = 0.0;
  double Ec = 0.0;        // (1/2) int |psi0 / r|^2 d2r at this resolution
  double U_over_g = 0.0;  // int |psi0|^4 d2r
};

namespace detail {

// Finite-volume discretization of the planar radial operator
//   -(1/2r) d/dr (r d/dr) + l^2/(2 r^2) + (R - r)^2 / 2
// on cell centers, symmetrized by w = u sqrt(r). The zero-flux face at r = 0
// makes l = 0 regular (no centrifugal singularity enters).
struct RadialMesh {
  VectorXd diag;
  VectorXd off;
  VectorXd r;
  double h;
};

inline RadialMesh radial_mesh(double R, int l, double h, double margin) {
  const int n = static_cast<int>(std::lround((R + margin) / h));
  if (n < 16) throw std::invalid_argument("radial: box too small for grid");
  RadialMesh m;
  m.h = h;
  m.r.resize(n);
  m.diag.resize(n);
  m.off.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * h;
    const double rp = r + 0.5 * h;
    const double rm = r - 0.5 * h;
    m.r[i] = r;
    m.diag[i] = (rp + rm) / (2.0 * r * h * h) + 0.5 * (R - r) * (R - r) +
                0.5 * l * l / (r * r);
    if (i + 1 < n) m.off[i] = -rp / (2.0 * h * h * std::sqrt(r * (r + h)));
  }
  return m;
}

inline double lowest_eigenvalue(const RadialMesh& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(m.diag, m.off, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Solves (T - sigma) x = b for the symmetric tridiagonal T; sigma sits just
// below the ground value, so the matrix is positive definite and the
// unpivoted sweep is stable.
inline void shifted_tridiag_solve(const RadialMesh& m, double sigma,
                                  VectorXd& x) {
  const Eigen::Index n = m.diag.size();
  VectorXd c(n), d(n);
  d[0] = m.diag[0] - sigma;
  c[0] = m.off[0] / d[0];
  x[0] /= d[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    d[i] = m.diag[i] - sigma - m.off[i - 1] * c[i - 1];
    if (i < n - 1) c[i] = m.off[i] / d[i];
    x[i] = (x[i] - m.off[i - 1] * x[i - 1]) / d[i];
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
}

inline VectorXd ground_vector(const RadialMesh& m, double e0) {
  const Eigen::Index n = m.diag.size();
  const double sigma = e0 - std::max(1e-10, 1e-10 * std::abs(e0));
  VectorXd x = VectorXd::Ones(n);
  for (int it = 0; it < 3; ++it) {
    shifted_tridiag_solve(m, sigma, x);
    x /= x.norm();
  }
  if (x.sum() < 0) x = -x;
  return x;
}

}  // namespace detail

// Ground state, centrifugal coefficient and interaction integral of a single
// ring. A two-resolution check guards against under-resolved grids.
inline SingleRingSolution solve_single_ring(double R,
                                            const RadialGrid& grid = {}) {
  if (R <= 0.0) throw std::invalid_argument("radial: R must be positive");
  if (grid.spacing <= 0.0 || grid.spacing > 0.1)
    throw std::invalid_argument("radial: grid spacing must resolve sigma/10");
  if (grid.margin < 4.0)
    throw std::invalid_argument("radial: margin must be at least 4 sigma");

  const auto mesh = detail::radial_mesh(R, 0, grid.spacing, grid.margin);
  const double e0 = detail::lowest_eigenvalue(mesh);
  const auto fine = detail::radial_mesh(R, 0, grid.spacing / 2, grid.margin);
  if (std::abs(detail::lowest_eigenvalue(fine) - e0) > 1e-4)
    throw std::runtime_error(
        "radial: grid too coarse, two-resolution energies disagree > 1e-4");

  SingleRingSolution sol;
  sol.R = R;
  sol.grid = grid;
  sol.r = mesh.r;
  sol.E0 = e0;
  const VectorXd w = detail::ground_vector(mesh, e0);
  // w = u sqrt(r); normalize u against the planar measure 2 pi r dr
  VectorXd u = w.cwiseQuotient(mesh.r.cwiseSqrt());
  const double nrm =
      2.0 * kPi * grid.spacing * (mesh.r.array() * u.array().square()).sum();
  u /= std::sqrt(nrm);
  sol.psi0 = u;
  sol.Ec = kPi * grid.spacing * (u.array().square() / mesh.r.array()).sum();
  sol.U_over_g =
      2.0 * kPi * grid.spacing * (mesh.r.array() * u.array().pow(4)).sum();
  return sol;
}

struct ModeEnergies {
  VectorXd exact;     // lowest eigenvalue per l = 0..l_max
  VectorXd harmonic;  // E0 + Ec l^2
};

inline ModeEnergies single_ring_mode_energies(const SingleRingSolution& sol,
                                              int l_max) {
  if (l_max < 0) throw std::invalid_argument("mode_energies: l_max < 0");
  ModeEnergies me;
  me.exact.resize(l_max + 1);
  me.harmonic.resize(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    me.exact[l] =
        l == 0 ? sol.E0
               : detail::lowest_eigenvalue(detail::radial_mesh(
                     sol.R, l, sol.grid.spacing, sol.grid.margin));
    me.harmonic[l] = sol.E0 + sol.Ec * l * l;
  }
  return me;
}

}  // namespace ringmag
