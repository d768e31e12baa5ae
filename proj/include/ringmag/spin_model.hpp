#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringmag/bose.hpp"
#include "ringmag/geometry.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

// Policy for the sigma_x sigma_y + sigma_y sigma_x coefficient on phased
// bonds. The two-spin-flip coefficient formula in circulation language and
// its numeric reduction disagree on this one entry; Oracle follows the
// numeric reduction (-sin(2 chi) J3^2 / 2U), Printed keeps the closed-form
// variant (-cos(2 chi) J3^2 / 2U) on cross-cell bonds.
enum class CrossTerm { Oracle, Printed };

struct SpinBond {
  int a = 0;
  int b = 0;
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();  // K(p,q) * sigma_p_a sigma_q_b
};

struct SpinModel {
  int sites = 0;
  Boundary boundary = Boundary::Periodic;
  std::vector<SpinBond> bonds;
  std::vector<Eigen::Vector3d> fields;  // h_j . sigma_j
  double c0 = 0.0;

  void require_valid() const {
    if (sites < 1) throw std::invalid_argument("spinmodel: no sites");
    if (static_cast<int>(fields.size()) != sites)
      throw std::invalid_argument("spinmodel: field count mismatch");
    for (const auto& b : bonds)
      if (b.a < 0 || b.b < 0 || b.a >= sites || b.b >= sites || b.a == b.b)
        throw std::invalid_argument("spinmodel: bond out of range");
  }
};

// Uniform XYZ couplings of the zero-field special-angle chain.
inline std::array<double, 3> xyz_couplings(const CouplingSet& c) {
  if (c.U <= 0.0) throw std::invalid_argument("xyz_couplings: U must be > 0");
  const double s = 1.0 / (2.0 * c.U);
  return {-(c.J2 * c.J2 + c.J3 * c.J3) * s, -(c.J2 * c.J2 - c.J3 * c.J3) * s,
          -3.0 * (c.J2 * c.J2 - c.J3 * c.J3) * s};
}

// Uniform field strength at the doubled special angles.
inline double field_coupling(const CouplingSet& c) {
  if (c.U <= 0.0) throw std::invalid_argument("field_coupling: U must be > 0");
  return 2.0 * c.J1 - 6.0 * c.J2 * c.J3 / c.U;
}

// Per-bond identity contribution of the second-order reduction.
inline double bond_offset(const CouplingSet& c) {
  return -5.0 * (c.J2 * c.J2 + c.J3 * c.J3) / (2.0 * c.U);
}

namespace detail {

inline Eigen::Matrix3d bond_matrix(const CouplingSet& c, double chi,
                                   BondTag tag, CrossTerm policy) {
  const double s = 1.0 / (2.0 * c.U);
  const double j22 = c.J2 * c.J2, j32 = c.J3 * c.J3;
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  K(0, 0) = -(j22 + std::cos(2.0 * chi) * j32) * s;
  K(1, 1) = -(j22 - std::cos(2.0 * chi) * j32) * s;
  K(2, 2) = -3.0 * (j22 - j32) * s;
  double kxy = -std::sin(2.0 * chi) * j32 * s;
  if (policy == CrossTerm::Printed)
    kxy = (tag == BondTag::CrossCell) ? -std::cos(2.0 * chi) * j32 * s : 0.0;
  K(0, 1) = K(1, 0) = kxy;
  return K;
}

}  // namespace detail

// Full second-order model on an explicit bond table: one-flip fields from
// the per-site bond factors, two-site couplings per bond, optional identity
// offset. The cross-term policy applies to phased (cross-cell) bonds.
// Parallel bonds are rejected: second-order paths leaving through one bond
// of a doubled pair can return through the other, which the per-bond
// coupling formula does not capture.
inline SpinModel assemble_from_bonds(const BondTable& bonds,
                                     const CouplingSet& c,
                                     Boundary boundary,
                                     CrossTerm policy = CrossTerm::Oracle,
                                     bool keep_offset = true) {
  if (c.U <= 0.0) throw std::invalid_argument("assemble: U must be > 0");
  std::set<std::pair<int, int>> seen;
  for (const auto& bd : bonds.bonds)
    if (!seen.emplace(std::min(bd.a, bd.b), std::max(bd.a, bd.b)).second)
      throw std::invalid_argument(
          "assemble: parallel bonds are outside the per-bond reduction");
  SpinModel m;
  m.sites = bonds.sites;
  m.boundary = boundary;
  m.fields.assign(m.sites, Eigen::Vector3d::Zero());

  const double amp = c.J1 - 3.0 * c.J2 * c.J3 / c.U;
  const auto F = site_flip_factors(bonds);
  for (int j = 0; j < m.sites; ++j)
    m.fields[j] = Eigen::Vector3d(amp * F[j].real(), -amp * F[j].imag(), 0.0);

  for (const auto& bd : bonds.bonds) {
    SpinBond sb;
    sb.a = bd.a;
    sb.b = bd.b;
    sb.K = detail::bond_matrix(c, bd.chi, bd.tag, policy);
    m.bonds.push_back(sb);
    if (keep_offset) m.c0 += bond_offset(c);
  }
  return m;
}

inline SpinModel assemble_general(const RingGeometry& g, const CouplingSet& c,
                                  CrossTerm policy = CrossTerm::Oracle,
                                  bool keep_offset = true) {
  const BondTable t = g.cell == CellKind::FourSite ? build_four_site_ladder(g)
                                                   : build_ladder(g);
  return assemble_from_bonds(t, c, g.boundary, policy, keep_offset);
}

namespace detail {

// Distance from l*Theta to the nearest odd multiple of period/2 (period pi
// for the zero-field angles, 2 pi for the uniform-field ones).
inline double odd_multiple_miss(double l_theta, double period) {
  const double q = l_theta / period - 0.5;
  return std::abs(q - std::round(q)) * period;
}

}  // namespace detail

inline bool is_xyz_angle(const RingGeometry& g, double tol = 1e-9) {
  return detail::odd_multiple_miss(g.l * g.effective_theta(), kPi) <= tol;
}

inline bool is_field_angle(const RingGeometry& g, double tol = 1e-9) {
  return detail::odd_multiple_miss(g.l * g.effective_theta(), 2.0 * kPi) <= tol;
}

// Maps a near-miss Theta onto the closest special angle of either family;
// returns the geometry unchanged when no special angle is within tol.
inline RingGeometry snap_special_angle(RingGeometry g, double tol = 1e-9) {
  if (g.cell == CellKind::FourSite) return g;
  for (const double period : {kPi, 2.0 * kPi}) {
    const double q = std::round(g.l * g.Theta / period - 0.5);
    const double snapped = (q + 0.5) * period / g.l;
    if (std::abs(snapped - g.Theta) <= tol && snapped > 0 && snapped <= kPi) {
      g.Theta = snapped;
      return g;
    }
  }
  return g;
}

namespace detail {

inline SpinModel uniform_xyz_chain(const BondTable& t, const CouplingSet& c,
                                   Boundary boundary, bool keep_offset) {
  SpinModel m;
  m.sites = t.sites;
  m.boundary = boundary;
  m.fields.assign(m.sites, Eigen::Vector3d::Zero());
  const auto J = xyz_couplings(c);
  for (const auto& bd : t.bonds) {
    SpinBond sb;
    sb.a = bd.a;
    sb.b = bd.b;
    sb.K.setZero();
    sb.K(0, 0) = J[0];
    sb.K(1, 1) = J[1];
    sb.K(2, 2) = J[2];
    m.bonds.push_back(sb);
    if (keep_offset) m.c0 += bond_offset(c);
  }
  return m;
}

}  // namespace detail

// Zero-field XYZ chain; defined only at l Theta = (2s+1) pi/2.
inline SpinModel assemble_xyz(const RingGeometry& g, const CouplingSet& c,
                              bool keep_offset = true) {
  if (!is_xyz_angle(g))
    throw std::invalid_argument(
        "assemble_xyz: l*Theta must be an odd multiple of pi/2");
  const BondTable t = build_ladder(g);
  return detail::uniform_xyz_chain(t, c, g.boundary, keep_offset);
}

// XYZ chain with uniform x field; defined only at l Theta = (2s+1) pi.
inline SpinModel assemble_xyz_field(const RingGeometry& g,
                                    const CouplingSet& c,
                                    bool keep_offset = true) {
  if (!is_field_angle(g))
    throw std::invalid_argument(
        "assemble_xyz_field: l*Theta must be an odd multiple of pi");
  const BondTable t = build_ladder(g);
  SpinModel m = detail::uniform_xyz_chain(t, c, g.boundary, keep_offset);
  const double h = field_coupling(c);
  // open edges carry half the flip factor of bulk sites
  std::vector<int> touch(m.sites, 0);
  for (const auto& bd : t.bonds) {
    ++touch[bd.a];
    ++touch[bd.b];
  }
  for (int j = 0; j < m.sites; ++j)
    m.fields[j] = Eigen::Vector3d(0.5 * h * touch[j], 0.0, 0.0);
  return m;
}

// Four-site-cell ladder at l = 1: uniform XYZ bonds with the staggered
// field pattern [0, +h, 0, -h] over each A B C D cell.
inline SpinModel assemble_staggered(const RingGeometry& g,
                                    const CouplingSet& c,
                                    bool keep_offset = true) {
  if (g.cell != CellKind::FourSite || g.l != 1)
    throw std::invalid_argument(
        "assemble_staggered: requires the four-site cell at l = 1");
  const BondTable t = build_four_site_ladder(g);
  SpinModel m = detail::uniform_xyz_chain(t, c, g.boundary, keep_offset);
  const double h = field_coupling(c);
  for (int j = 0; j < m.sites; ++j) {
    const int pos = j % 4;
    double sign = 0.0;
    if (pos == 1) sign = 1.0;
    if (pos == 3) sign = -1.0;
    m.fields[j] = Eigen::Vector3d(sign * h, 0.0, 0.0);
  }
  if (g.boundary == Boundary::Open) {
    // edge sites recompute their factor from the bonds they actually touch
    const auto F = site_flip_factors(t);
    const double amp = c.J1 - 3.0 * c.J2 * c.J3 / c.U;
    m.fields.front() =
        Eigen::Vector3d(amp * F.front().real(), -amp * F.front().imag(), 0.0);
    m.fields.back() =
        Eigen::Vector3d(amp * F.back().real(), -amp * F.back().imag(), 0.0);
  }
  return m;
}

// Plain-text serialization, hexfloat fields for bit-exact round trips.
// Only the entries our assemblers emit (xx, yy, zz, symmetric xy) are
// representable.
inline std::string to_text(const SpinModel& m) {
  m.require_valid();
  char buf[512];
  std::string out = "spinmodel 1\n";
  out += "sites " + std::to_string(m.sites) + "\n";
  out += std::string("boundary ") +
         (m.boundary == Boundary::Periodic ? "periodic" : "open") + "\n";
  std::snprintf(buf, sizeof buf, "offset %a\n", m.c0);
  out += buf;
  out += "bonds " + std::to_string(m.bonds.size()) + "\n";
  for (const auto& b : m.bonds) {
    if (b.K(0, 2) != 0 || b.K(2, 0) != 0 || b.K(1, 2) != 0 || b.K(2, 1) != 0 ||
        b.K(0, 1) != b.K(1, 0))
      throw std::invalid_argument("to_text: unsupported bond matrix shape");
    std::snprintf(buf, sizeof buf, "bond %d %d %a %a %a %a\n", b.a, b.b,
                  b.K(0, 0), b.K(1, 1), b.K(2, 2), b.K(0, 1));
    out += buf;
  }
  for (int j = 0; j < m.sites; ++j) {
    std::snprintf(buf, sizeof buf, "site %d %a %a %a\n", j, m.fields[j][0],
                  m.fields[j][1], m.fields[j][2]);
    out += buf;
  }
  return out;
}

inline SpinModel from_text(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  int version = 0;
  if (!(in >> tok >> version) || tok != "spinmodel" || version != 1)
    throw std::invalid_argument("from_text: bad header");
  SpinModel m;
  std::size_t n_bonds = 0;
  auto read_double = [&in](const char* what) {
    std::string s;
    if (!(in >> s)) throw std::invalid_argument(std::string("from_text: ") + what);
    return std::stod(s);
  };
  while (in >> tok) {
    if (tok == "sites") {
      in >> m.sites;
      m.fields.assign(m.sites, Eigen::Vector3d::Zero());
    } else if (tok == "boundary") {
      in >> tok;
      m.boundary = tok == "periodic" ? Boundary::Periodic : Boundary::Open;
    } else if (tok == "offset") {
      m.c0 = read_double("offset");
    } else if (tok == "bonds") {
      in >> n_bonds;
    } else if (tok == "bond") {
      SpinBond b;
      in >> b.a >> b.b;
      b.K.setZero();
      b.K(0, 0) = read_double("Kxx");
      b.K(1, 1) = read_double("Kyy");
      b.K(2, 2) = read_double("Kzz");
      b.K(0, 1) = b.K(1, 0) = read_double("Kxy");
      m.bonds.push_back(b);
    } else if (tok == "site") {
      int j = 0;
      in >> j;
      if (j < 0 || j >= m.sites)
        throw std::invalid_argument("from_text: site index out of range");
      m.fields[j][0] = read_double("hx");
      m.fields[j][1] = read_double("hy");
      m.fields[j][2] = read_double("hz");
    } else {
      throw std::invalid_argument("from_text: unknown token " + tok);
    }
  }
  if (m.bonds.size() != n_bonds)
    throw std::invalid_argument("from_text: bond count mismatch");
  m.require_valid();
  return m;
}

}  // namespace ringmag
