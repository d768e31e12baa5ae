#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringmag/types.hpp"

namespace ringmag {

enum class CellKind { TwoSite, FourSite };
enum class Boundary { Periodic, Open };

// Ring-ladder description. N rings of radius R (surface separation d) along a
// chain; neighbours subtend central angle Theta at each ring; the bosons live
// in the circulation manifold +-l.
struct RingGeometry {
  double R = 2.5;
  double d = 2.0;
  double Theta = kPi / 2;
  int l = 1;
  int N = 4;
  CellKind cell = CellKind::TwoSite;
  Boundary boundary = Boundary::Periodic;
  // Origin-of-phases marker: 0 puts the hopping phase on cross-cell links,
  // any other value flags the alternative (in-cell) gauge.
  double phi0 = 0.0;
  // Theta <= pi/3 means next-nearest rings approach; allowed only in tests.
  bool allow_small_angle = false;

  void validate() const {
    if (R <= 0.0) throw std::invalid_argument("geometry: R must be positive");
    if (d <= 0.0) throw std::invalid_argument("geometry: d must be positive");
    if (l < 1) throw std::invalid_argument("geometry: l must be >= 1");
    if (N < 2 || N % 2 != 0)
      throw std::invalid_argument("geometry: N must be even and >= 2");
    if (boundary == Boundary::Periodic && N < 4)
      throw std::invalid_argument(
          "geometry: periodic chains need N >= 4, wrapping N = 2 doubles "
          "the single bond");
    if (Theta <= 0.0 || Theta > kPi)
      throw std::invalid_argument("geometry: Theta must lie in (0, pi]");
    if (Theta <= kPi / 3 && !allow_small_angle)
      throw std::invalid_argument(
          "geometry: Theta <= pi/3 brings non-neighbour rings into contact");
    if (cell == CellKind::FourSite && N % 4 != 0)
      throw std::invalid_argument("geometry: four-site cell needs N % 4 == 0");
  }

  // The four-site cell is a right-angle ladder; its Theta is fixed.
  double effective_theta() const {
    return cell == CellKind::FourSite ? kPi / 2 : Theta;
  }
  double bond_phase() const {
    double chi = std::fmod(2.0 * l * effective_theta(), 2.0 * kPi);
    return chi < 0 ? chi + 2.0 * kPi : chi;
  }
};

enum class BondTag { InCell, CrossCell };

struct Bond {
  int a = 0;
  int b = 0;
  double chi = 0.0;  // phase on circulation-exchanging hops across this bond
  BondTag tag = BondTag::InCell;
};

struct BondTable {
  int sites = 0;
  std::vector<Bond> bonds;

  double phase_sum() const {
    double s = 0.0;
    for (const auto& bd : bonds) s += bd.chi;
    return s;
  }
};

// Chain of two-site cells; bond k joins sites (k, k+1). In-cell bonds carry
// chi = 0, cross-cell bonds carry chi = 2 l Theta. Periodic tables wrap the
// alternating tag pattern.
inline BondTable build_ladder(const RingGeometry& g) {
  g.validate();
  if (g.cell != CellKind::TwoSite)
    throw std::invalid_argument("build_ladder: requires the two-site cell");
  const double chi = g.bond_phase();
  BondTable t;
  t.sites = g.N;
  const int nb = g.boundary == Boundary::Periodic ? g.N : g.N - 1;
  t.bonds.reserve(nb);
  for (int k = 0; k < nb; ++k) {
    Bond bd;
    bd.a = k;
    bd.b = (k + 1) % g.N;
    bd.tag = (k % 2 == 0) ? BondTag::InCell : BondTag::CrossCell;
    bd.chi = (bd.tag == BondTag::CrossCell) ? chi : 0.0;
    t.bonds.push_back(bd);
  }
  return t;
}

// Right-angle ladder of four-site cells A-B-C-D; A-B and B-C are unphased,
// C-D and D-A' carry the phase. Theta is pi/2 by construction.
inline BondTable build_four_site_ladder(const RingGeometry& g) {
  g.validate();
  if (g.cell != CellKind::FourSite)
    throw std::invalid_argument(
        "build_four_site_ladder: requires the four-site cell");
  const double chi = g.bond_phase();  // 2 l (pi/2) = l pi
  BondTable t;
  t.sites = g.N;
  const int nb = g.boundary == Boundary::Periodic ? g.N : g.N - 1;
  for (int k = 0; k < nb; ++k) {
    Bond bd;
    bd.a = k;
    bd.b = (k + 1) % g.N;
    const int pos = k % 4;  // 0:A-B 1:B-C 2:C-D 3:D-A'
    bd.tag = (pos <= 1) ? BondTag::InCell : BondTag::CrossCell;
    bd.chi = (bd.tag == BondTag::CrossCell) ? chi : 0.0;
    t.bonds.push_back(bd);
  }
  return t;
}

// Same ladder in the other gauge (phases on in-cell links); related to
// build_ladder by a site-local phase rotation, so spectra must agree.
inline BondTable build_ladder_alternate_gauge(const RingGeometry& g) {
  BondTable t = build_ladder(g);
  const double chi = g.bond_phase();
  for (auto& bd : t.bonds) {
    if (bd.tag == BondTag::InCell) {
      bd.chi = chi;
    } else {
      bd.chi = 0.0;
    }
  }
  return t;
}

inline std::string to_string(BondTag tag) {
  return tag == BondTag::InCell ? "in-cell" : "cross-cell";
}

}  // namespace ringmag
