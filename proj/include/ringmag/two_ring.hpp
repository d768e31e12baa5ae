#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ringmag/bose.hpp"
#include "ringmag/lanczos.hpp"
#include "ringmag/parallel.hpp"
#include "ringmag/radial.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

// Cell-centered 2D grid for the double-ring potential. The box is symmetric
// about both axes so the reflection operators are exact index flips.
struct TwoRingGrid {
  double spacing = 0.1;
  double margin = 3.5;  // clearance beyond the outer ring edge
};

struct TwoRingSolution {
  double R = 0.0;
  double d = 0.0;   // surface gap; center distance D = 2R + d
  double D = 0.0;
  TwoRingGrid grid;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;            // lowest-k energies, ascending
  MatrixXd vectors;                      // grid dim x k
  VectorXd residuals;                    // iterative solver residuals
  Eigen::SparseMatrix<double> H;         // kept for Rayleigh quotients

  int dim() const { return nx * ny; }
  int index(int ix, int iy) const { return ix * ny + iy; }
  double x(int ix) const { return (ix + 0.5 - 0.5 * nx) * grid.spacing; }
  double y(int iy) const { return (iy + 0.5 - 0.5 * ny) * grid.spacing; }
};

inline LanczosOptions two_ring_lanczos_defaults() {
  LanczosOptions opt;
  opt.block = 4;
  opt.max_basis = 240;
  opt.tol = 1e-13;
  opt.residual_tol = 1e-10;
  opt.seed = 0x7719b0a57a2d11c5ull;
  return opt;
}

// x-reflection (ring exchange) of a flattened grid function.
inline VectorXd reflect_x(const TwoRingSolution& sol, const VectorXd& v) {
  VectorXd out(v.size());
  for (int ix = 0; ix < sol.nx; ++ix)
    for (int iy = 0; iy < sol.ny; ++iy)
      out[sol.index(sol.nx - 1 - ix, iy)] = v[sol.index(ix, iy)];
  return out;
}

// y-reflection (per-ring mirror) of a flattened grid function.
inline VectorXd reflect_y(const TwoRingSolution& sol, const VectorXd& v) {
  VectorXd out(v.size());
  for (int ix = 0; ix < sol.nx; ++ix)
    for (int iy = 0; iy < sol.ny; ++iy)
      out[sol.index(ix, sol.ny - 1 - iy)] = v[sol.index(ix, iy)];
  return out;
}

// Lowest eigenpairs of two overlapping ring traps, V = min of the two ring
// wells, by shift-invert block Lanczos on the factored 5-point Hamiltonian.
inline TwoRingSolution solve_two_ring(double R, double d, TwoRingGrid grid = {},
                                      int k = 12,
                                      LanczosOptions opt =
                                          two_ring_lanczos_defaults()) {
  if (R <= 0.0 || d <= 0.0)
    throw std::invalid_argument("two_ring: R and d must be positive");
  if (grid.spacing <= 0.0 || grid.spacing > 0.25)
    throw std::invalid_argument("two_ring: spacing out of range (0, 0.25]");
  if (grid.margin < 2.0)
    throw std::invalid_argument("two_ring: margin below 2");

  TwoRingSolution sol;
  sol.R = R;
  sol.d = d;
  sol.D = 2.0 * R + d;
  sol.grid = grid;
  const double h = grid.spacing;
  const double Lx = sol.D / 2.0 + R + grid.margin;
  const double Ly = R + grid.margin;
  sol.nx = 2 * static_cast<int>(std::ceil(Lx / h));
  sol.ny = 2 * static_cast<int>(std::ceil(Ly / h));
  const int dim = sol.dim();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * 5);
  const double diag_kin = 2.0 / (h * h);
  const double off_kin = -0.5 / (h * h);
  for (int ix = 0; ix < sol.nx; ++ix)
    for (int iy = 0; iy < sol.ny; ++iy) {
      const int i = sol.index(ix, iy);
      const double xc = sol.x(ix);
      const double yc = sol.y(iy);
      const double r1 = std::hypot(xc + sol.D / 2.0, yc);
      const double r2 = std::hypot(xc - sol.D / 2.0, yc);
      const double v1 = R - r1;
      const double v2 = R - r2;
      trip.emplace_back(i, i, diag_kin + 0.5 * std::min(v1 * v1, v2 * v2));
      if (ix > 0) trip.emplace_back(i, sol.index(ix - 1, iy), off_kin);
      if (ix + 1 < sol.nx) trip.emplace_back(i, sol.index(ix + 1, iy), off_kin);
      if (iy > 0) trip.emplace_back(i, sol.index(ix, iy - 1), off_kin);
      if (iy + 1 < sol.ny) trip.emplace_back(i, sol.index(ix, iy + 1), off_kin);
    }
  sol.H.resize(dim, dim);
  sol.H.setFromTriplets(trip.begin(), trip.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sol.H);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("two_ring: Cholesky factorization failed");

  // H is positive definite, so the lowest eigenvalues of -H^{-1} map to the
  // lowest of H in the same order.
  opt.k = k;
  auto apply = [&ldlt](const MatrixXd& in, MatrixXd& out) {
    out = -ldlt.solve(in);
  };
  const LanczosResult<double> res = block_lanczos<double>(dim, apply, opt);
  if (!res.converged)
    throw std::runtime_error("two_ring: eigensolver failed to converge");

  sol.values.resize(k);
  sol.vectors = res.vectors;
  sol.residuals = res.residuals;
  for (int i = 0; i < k; ++i) {
    const VectorXd v = res.vectors.col(i);
    sol.values[i] = v.dot(sol.H * v);  // Rayleigh quotient on the original H
  }
  for (int i = 0; i + 1 < k; ++i)
    if (sol.values[i] > sol.values[i + 1] + 1e-9)
      throw std::runtime_error("two_ring: eigenvalue ordering broke");
  return sol;
}

namespace detail {

// Linear interpolation of the single-ring radial profile onto radius rr;
// zero beyond the radial grid.
inline double interp_psi0(const SingleRingSolution& ring, double rr) {
  const auto& r = ring.r;
  const auto& p = ring.psi0;
  const int n = static_cast<int>(r.size());
  if (rr <= r[0]) return p[0];
  if (rr >= r[n - 1]) return 0.0;
  const double t = rr / ring.grid.spacing - 0.5;
  const int i0 = std::min(n - 2, std::max(0, static_cast<int>(t)));
  const double f = t - i0;
  return p[i0] * (1.0 - f) + p[i0 + 1] * f;
}

}  // namespace detail

struct ManifoldSelection {
  std::vector<int> states;   // indices into TwoRingSolution::values
  VectorXd projections;      // onto the reference span, one per solved state
  double min_selected = 0.0;
  double max_rejected = 0.0;
};

// Picks the four states spanning {ring 1, ring 2} x {cos, sin} angular
// references built from the single-ring radial profile. Selection is by
// projection norm, never by energy: the manifold interleaves with radial
// excitations once the rings overlap strongly.
inline ManifoldSelection identify_manifold(const TwoRingSolution& sol,
                                           const SingleRingSolution& ring,
                                           int l, bool swap_rings = false) {
  if (l < 1) throw std::invalid_argument("identify_manifold: l >= 1");
  const int dim = sol.dim();
  const int nstates = static_cast<int>(sol.values.size());
  if (nstates < 5)
    throw std::invalid_argument("identify_manifold: need > 4 solved states");

  MatrixXd refs(dim, 4);
  const double cx1 = swap_rings ? +sol.D / 2.0 : -sol.D / 2.0;
  const double cx2 = -cx1;
  for (int ix = 0; ix < sol.nx; ++ix)
    for (int iy = 0; iy < sol.ny; ++iy) {
      const int i = sol.index(ix, iy);
      const double xc = sol.x(ix);
      const double yc = sol.y(iy);
      const double p1 = detail::interp_psi0(ring, std::hypot(xc - cx1, yc));
      const double p2 = detail::interp_psi0(ring, std::hypot(xc - cx2, yc));
      const double t1 = std::atan2(yc, xc - cx1);
      const double t2 = std::atan2(yc, xc - cx2);
      refs(i, 0) = p1 * std::cos(l * t1);
      refs(i, 1) = p1 * std::sin(l * t1);
      refs(i, 2) = p2 * std::cos(l * t2);
      refs(i, 3) = p2 * std::sin(l * t2);
    }
  for (int c = 0; c < 4; ++c) refs.col(c).normalize();
  const Eigen::HouseholderQR<MatrixXd> qr(refs);
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(dim, 4);

  ManifoldSelection pick;
  pick.projections.resize(nstates);
  for (int i = 0; i < nstates; ++i)
    pick.projections[i] = (Q.transpose() * sol.vectors.col(i)).norm();

  std::vector<int> order(nstates);
  for (int i = 0; i < nstates; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pick.projections[a] > pick.projections[b];
  });
  pick.states.assign(order.begin(), order.begin() + 4);
  std::sort(pick.states.begin(), pick.states.end());
  pick.min_selected = pick.projections[order[3]];
  pick.max_rejected = pick.projections[order[4]];
  // At strong ring overlap the trap ground state leaks into the reference
  // span (projection ~0.6 at d = sigma), so the gate only rejects genuinely
  // ambiguous rankings.
  if (pick.min_selected < 0.5 ||
      pick.min_selected < 1.2 * pick.max_rejected)
    throw std::runtime_error("identify_manifold: manifold not separated");
  return pick;
}

// Energies of the four reflection sectors, labeled by the angular-momentum
// quantum numbers (c, s) they map to.
struct SectorEnergies {
  double e_pp = 0.0;  // (c, s) = (+1, +1)
  double e_pm = 0.0;  // (+1, -1)
  double e_mp = 0.0;  // (-1, +1)
  double e_mm = 0.0;  // (-1, -1)
};

// Inversion of E(c, s) = Ebar + c J1 + s J2 + c s J3.
struct SectorInversion {
  double ebar = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
  double J3 = 0.0;
};

inline SectorInversion extract_from_sector_energies(const SectorEnergies& e) {
  SectorInversion out;
  out.ebar = 0.25 * (e.e_pp + e.e_pm + e.e_mp + e.e_mm);
  out.J1 = 0.25 * (e.e_pp + e.e_pm - e.e_mp - e.e_mm);
  out.J2 = 0.25 * (e.e_pp - e.e_pm + e.e_mp - e.e_mm);
  out.J3 = 0.25 * (e.e_pp - e.e_pm - e.e_mp + e.e_mm);
  return out;
}

// Projects the manifold onto the four (Px, Py) reflection sectors and takes
// the dominant direction of each projected span; its Rayleigh quotient is the
// sector energy. Sector labels translate to (c, s) through the parity of the
// angular references: c = Py, s = Px (-1)^l conditioned on c.
inline SectorEnergies sector_energies(const TwoRingSolution& sol,
                                      const ManifoldSelection& pick, int l) {
  SectorEnergies out;
  const int dim = sol.dim();
  const int sgn = l % 2 == 0 ? +1 : -1;
  for (int px : {+1, -1})
    for (int py : {+1, -1}) {
      MatrixXd W(dim, 4);
      for (int c = 0; c < 4; ++c) {
        VectorXd t = sol.vectors.col(pick.states[c]);
        t = 0.5 * (t + px * reflect_x(sol, t));
        t = 0.5 * (t + py * reflect_y(sol, t));
        W.col(c) = t;
      }
      const Eigen::SelfAdjointEigenSolver<MatrixXd> gram(W.transpose() * W);
      VectorXd wv = W * gram.eigenvectors().col(3);
      const double nrm = wv.norm();
      if (nrm < 1e-6)
        throw std::runtime_error("sector_energies: sector projection collapsed");
      wv /= nrm;
      const double e = wv.dot(sol.H * wv);
      const int c = py;
      const int s = c == +1 ? px * sgn : -px * sgn;
      if (c == +1 && s == +1) out.e_pp = e;
      if (c == +1 && s == -1) out.e_pm = e;
      if (c == -1 && s == +1) out.e_mp = e;
      if (c == -1 && s == -1) out.e_mm = e;
    }
  return out;
}

// Full pipeline: manifold identification, sector classification, inversion.
// U is left at its neutral value; apply a policy afterwards.
inline CouplingSet extract_couplings(const TwoRingSolution& sol,
                                     const SingleRingSolution& ring, int l,
                                     bool swap_rings = false) {
  const ManifoldSelection pick = identify_manifold(sol, ring, l, swap_rings);
  const SectorInversion inv =
      extract_from_sector_energies(sector_energies(sol, pick, l));
  CouplingSet c;
  c.J1 = inv.J1;
  c.J2 = inv.J2;
  c.J3 = inv.J3;
  c.U = 1.0;
  c.Ec = ring.Ec;
  c.E0 = ring.E0;
  c.l = l;
  c.provenance = Provenance::Solved;
  return c;
}

// Contact strength g that realizes U = ratio * max(|J2|, |J3|) given the
// single-ring overlap integral U/g.
inline double g_for_u_ratio(const SingleRingSolution& ring,
                            const CouplingSet& c, double ratio) {
  if (ratio <= 0.0) throw std::invalid_argument("g_for_u_ratio: ratio <= 0");
  const double scale = std::max(std::abs(c.J2), std::abs(c.J3));
  if (scale == 0.0) throw std::invalid_argument("g_for_u_ratio: J2 = J3 = 0");
  return ratio * scale / ring.U_over_g;
}

inline CouplingSet with_u_ratio(CouplingSet c, double ratio) {
  if (ratio <= 0.0) throw std::invalid_argument("with_u_ratio: ratio <= 0");
  const double scale = std::max(std::abs(c.J2), std::abs(c.J3));
  if (scale == 0.0) throw std::invalid_argument("with_u_ratio: J2 = J3 = 0");
  c.U = ratio * scale;
  return c;
}

struct SweepPoint {
  double d = 0.0;
  CouplingSet couplings;
};

// Extraction across a list of gaps at fixed radius; one shared single-ring
// solve, independent 2D solves fanned out over jobs.
inline std::vector<SweepPoint> coupling_sweep(double R,
                                              const std::vector<double>& ds,
                                              int l, TwoRingGrid grid = {},
                                              RadialGrid rgrid = {},
                                              int jobs = 1, int k = -1) {
  const SingleRingSolution ring = solve_single_ring(R, rgrid);
  if (k < 0) k = 8 + 4 * l;
  std::vector<SweepPoint> out(ds.size());
  parallel_for(ds.size(), jobs, [&](std::size_t i) {
    out[i].d = ds[i];
    const TwoRingSolution sol = solve_two_ring(R, ds[i], grid, k);
    out[i].couplings = extract_couplings(sol, ring, l);
  });
  return out;
}

}  // namespace ringmag
