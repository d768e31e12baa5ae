#pragma once

#include <cmath>
#include <stdexcept>

#include "ringmag/bose.hpp"
#include "ringmag/geometry.hpp"
#include "ringmag/spin_model.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

// Single-parameter XYZ family: J2 fixed, J3 = r J2. Sweeping r through
// sqrt(2) drives the zz coupling through -Kxx while the chain stays
// field-free; the workhorse for finite-size crossing scans.
inline SpinModel xyz_ratio_chain(double r, int N,
                                 Boundary bc = Boundary::Periodic,
                                 double J2 = 1.0, double U = 20.0) {
  if (r <= 0.0) throw std::invalid_argument("xyz_ratio_chain: r must be > 0");
  RingGeometry g;
  g.Theta = kPi / 2;
  g.l = 1;
  g.N = N;
  g.boundary = bc;
  CouplingSet c;
  c.J1 = 0.0;
  c.J2 = J2;
  c.J3 = r * J2;
  c.U = U;
  c.provenance = Provenance::Injected;
  return assemble_xyz(g, c, /*keep_offset=*/false);
}

// Distance-parametrized coupling family with both transition mechanisms in
// range: the coupling ratio passes sqrt(2) at critical_d() and the one-flip
// field amplitude changes sign at field_zero_d(). Exponential envelopes mimic
// tunneling decay; the constants place the two features well apart.
struct InjectedFamily {
  double rho0 = 1.2;      // ratio excess at d = 1
  double rho_len = 0.94;  // ratio decay length
  double tau0 = 0.3909;   // J1/J3 envelope at d = 1
  double tau_len = 1.8857;
  double tau_off = -0.05;
  double u_ratio = 20.0;  // U / J3

  double rho(double d) const {
    return 1.0 + rho0 * std::exp(-(d - 1.0) / rho_len);
  }
  double tau(double d) const {
    return tau0 * std::exp(-(d - 1.0) / tau_len) + tau_off;
  }

  CouplingSet couplings(double d) const {
    CouplingSet c;
    c.J2 = 1.0;
    c.J3 = rho(d) * c.J2;
    c.J1 = tau(d) * c.J3;
    c.U = u_ratio * c.J3;
    c.provenance = Provenance::Injected;
    return c;
  }

  // rho(d) = sqrt(2), in closed form.
  double critical_d() const {
    return 1.0 + rho_len * std::log(rho0 / (std::sqrt(2.0) - 1.0));
  }

  // Zero of the one-flip field 2 J1 - 6 J2 J3 / U: tau rho = 3 / u_ratio.
  double field_zero_d(double lo = 1.0, double hi = 6.0) const {
    const double target = 3.0 / u_ratio;
    auto f = [&](double d) { return tau(d) * rho(d) - target; };
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0)
      throw std::runtime_error("field_zero_d: no sign change in bracket");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if (flo * fm < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    return 0.5 * (lo + hi);
  }
};

// Spin chain of the family at gap d, on N sites with the bond phase set by
// Theta. The generic assembler keeps the full anisotropy and the one-flip
// fields; the cross-term policy is forwarded.
inline SpinModel family_model(const InjectedFamily& fam, double d, int N,
                              double Theta = 0.48 * kPi,
                              CrossTerm policy = CrossTerm::Printed) {
  RingGeometry g;
  g.d = d;
  g.Theta = Theta;
  g.l = 1;
  g.N = N;
  return assemble_general(g, fam.couplings(d), policy, /*keep_offset=*/false);
}

}  // namespace ringmag
