#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ringmag/fock.hpp"
#include "ringmag/geometry.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

// Microscopic couplings; provenance records whether they came from the
// continuum solver or were injected by hand.
enum class Provenance { Solved, Injected };

struct CouplingSet {
  double J1 = 0.0;  // on-site circulation flip
  double J2 = 0.0;  // inter-ring circulation-preserving hop
  double J3 = 0.0;  // inter-ring circulation-exchanging hop
  double U = 1.0;   // same-flavor doublon energy; mixed doublon costs 2U
  double Ec = 0.0;
  double E0 = 0.0;
  int l = 1;
  Provenance provenance = Provenance::Injected;

  double strong_coupling_ratio() const {
    return std::max(std::abs(J2), std::abs(J3)) / U;
  }
  bool strong_coupling_ok(double threshold = 0.1) const {
    return U > 0 && strong_coupling_ratio() <= threshold;
  }
};

// Two-mode Bose-Hubbard on a bond table. Kinetic and interaction parts are
// kept separate; the full operator is their sum.
struct BoseHamiltonian {
  FockSpace space;
  MatrixXcd kinetic;
  VectorXd interaction;  // diagonal

  MatrixXcd full() const {
    MatrixXcd h = kinetic;
    h.diagonal() += interaction.cast<Complex>();
    return h;
  }
};

namespace detail {

// b_dst^dag b_src with bosonic matrix elements, accumulated into H.
inline void add_hop(MatrixXcd& H, const FockSpace& f, Complex amp, int src_mode,
                    int dst_mode) {
  std::vector<int> t;
  for (int k = 0; k < f.dim(); ++k) {
    const auto& s = f.states[k];
    const int n_src = s[src_mode];
    if (n_src == 0) continue;
    t = s;
    t[src_mode] -= 1;
    const int n_dst = t[dst_mode];
    t[dst_mode] += 1;
    const int kk = f.index.at(t);
    H(kk, k) += amp * std::sqrt(double(n_src) * double(n_dst + 1));
  }
}

}  // namespace detail

// Site factors F_j = sum over bonds at j of e^{-i chi_b}; the one-flip term
// on site j carries J1 * F_j. On the periodic ladder every F_j equals
// 1 + e^{-i 2 l Theta}; open edges get the factor from their actual bonds.
inline std::vector<Complex> site_flip_factors(const BondTable& bonds) {
  std::vector<Complex> F(bonds.sites, Complex(0, 0));
  for (const auto& bd : bonds.bonds) {
    const Complex ph = std::exp(Complex(0, -bd.chi));
    F[bd.a] += ph;
    F[bd.b] += ph;
  }
  return F;
}

// H = + J1 sum_j (F_j a+_j^dag a-_j + h.c.)
//     + J2 sum_b sum_f (a_f,i^dag a_f,j + h.c.)
//     + J3 sum_b (e^{-i chi_b} (a+_i^dag a-_j + a+_j^dag a-_i) + h.c.)
//     + (U/2) sum_j [n+(n+-1) + n-(n--1) + 4 n+ n-]
// Circulation-raising hops carry e^{-i chi}, lowering e^{+i chi}.
inline BoseHamiltonian build_bose_hamiltonian(const BondTable& bonds,
                                              const CouplingSet& c,
                                              int particles,
                                              int dimension_cap = 2000000) {
  BoseHamiltonian bh;
  bh.space = make_fock_space(bonds.sites, particles);
  if (bh.space.dim() > dimension_cap)
    throw std::runtime_error("bose: basis dimension exceeds cap");
  const int dim = bh.space.dim();
  bh.kinetic = MatrixXcd::Zero(dim, dim);
  bh.interaction = VectorXd::Zero(dim);

  const auto F = site_flip_factors(bonds);
  const auto mode_p = [](int j) { return 2 * j; };
  const auto mode_m = [](int j) { return 2 * j + 1; };

  for (int j = 0; j < bonds.sites; ++j) {
    if (c.J1 != 0.0 && F[j] != Complex(0, 0)) {
      detail::add_hop(bh.kinetic, bh.space, c.J1 * F[j], mode_m(j), mode_p(j));
      detail::add_hop(bh.kinetic, bh.space, c.J1 * std::conj(F[j]), mode_p(j),
                      mode_m(j));
    }
  }
  for (const auto& bd : bonds.bonds) {
    if (c.J2 != 0.0) {
      for (int f = 0; f < 2; ++f) {
        detail::add_hop(bh.kinetic, bh.space, c.J2, 2 * bd.a + f, 2 * bd.b + f);
        detail::add_hop(bh.kinetic, bh.space, c.J2, 2 * bd.b + f, 2 * bd.a + f);
      }
    }
    if (c.J3 != 0.0) {
      const Complex ph = std::exp(Complex(0, -bd.chi));
      detail::add_hop(bh.kinetic, bh.space, c.J3 * ph, mode_m(bd.b), mode_p(bd.a));
      detail::add_hop(bh.kinetic, bh.space, c.J3 * ph, mode_m(bd.a), mode_p(bd.b));
      detail::add_hop(bh.kinetic, bh.space, c.J3 * std::conj(ph), mode_p(bd.b),
                      mode_m(bd.a));
      detail::add_hop(bh.kinetic, bh.space, c.J3 * std::conj(ph), mode_p(bd.a),
                      mode_m(bd.b));
    }
  }
  for (int k = 0; k < dim; ++k) {
    const auto& s = bh.space.states[k];
    double e = 0.0;
    for (int j = 0; j < bonds.sites; ++j) {
      const double np = s[2 * j], nm = s[2 * j + 1];
      e += 0.5 * c.U * (np * (np - 1) + nm * (nm - 1) + 4.0 * np * nm);
    }
    bh.interaction[k] = e;
  }
  return bh;
}

// Projector-based strong-coupling reduction on the unit-filled manifold:
//   Heff = M H0 M - (M H0 O) (O Hint O)^{-1} (O H0 M)
// with the orthogonal space restricted to exactly-one-doublon states.
// Output is indexed by spin configuration (bit j set <=> site j holds +l).
inline MatrixXcd effective_hamiltonian_numeric(const BoseHamiltonian& bh) {
  const auto& f = bh.space;
  if (f.particles != f.sites)
    throw std::invalid_argument("effective_hamiltonian: requires unit filling");
  const auto mott = mott_states(f);

  std::vector<int> ortho;
  for (int k = 0; k < f.dim(); ++k) {
    const auto& s = f.states[k];
    int doublons = 0, holes = 0, singles = 0;
    for (int j = 0; j < f.sites; ++j) {
      const int tot = s[2 * j] + s[2 * j + 1];
      if (tot == 2)
        ++doublons;
      else if (tot == 0)
        ++holes;
      else if (tot == 1)
        ++singles;
    }
    if (doublons == 1 && holes == 1 && singles == f.sites - 2) ortho.push_back(k);
  }

  const int nm = static_cast<int>(mott.size());
  const int no = static_cast<int>(ortho.size());
  MatrixXcd P(nm, nm), W(no, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b) P(a, b) = bh.kinetic(mott[a], mott[b]);
  for (int a = 0; a < no; ++a)
    for (int b = 0; b < nm; ++b) W(a, b) = bh.kinetic(ortho[a], mott[b]);
  VectorXd D(no);
  for (int a = 0; a < no; ++a) {
    D[a] = bh.interaction[ortho[a]];
    if (D[a] <= 0.0)
      throw std::runtime_error("effective_hamiltonian: singular virtual block");
  }
  return P - W.adjoint() * D.cwiseInverse().asDiagonal() * W;
}

}  // namespace ringmag
