#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ringmag/families.hpp"
#include "ringmag/spin_model.hpp"

using namespace ringmag;

TEST_CASE("injected family envelopes and their landmarks") {
  const InjectedFamily fam;
  CHECK(fam.rho(1.0) == doctest::Approx(2.2).epsilon(1e-14));
  CHECK(fam.tau(1.0) == doctest::Approx(0.3409).epsilon(1e-14));

  const double dc = fam.critical_d();
  CHECK(fam.rho(dc) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dc == doctest::Approx(2.0).epsilon(1e-3));

  const double dz = fam.field_zero_d();
  CHECK(fam.tau(dz) * fam.rho(dz) ==
        doctest::Approx(3.0 / fam.u_ratio).epsilon(1e-10));
  CHECK(std::abs(dz - 2.5495109512693563) < 0.01);
  CHECK(dz > dc);  // the two transitions stay well separated

  // the field amplitude changes sign across dz and nowhere between dc and dz
  const auto field = [&fam](double d) {
    return field_coupling(fam.couplings(d));
  };
  CHECK(field(dz - 0.2) * field(dz + 0.2) < 0.0);
  for (double d = dc; d < dz - 0.05; d += 0.05) CHECK(field(d) > 0.0);
}

TEST_CASE("family couplings follow the envelopes") {
  const InjectedFamily fam;
  for (const double d : {1.0, 1.8, 2.6, 3.4}) {
    const CouplingSet c = fam.couplings(d);
    CHECK(c.J2 == 1.0);
    CHECK(c.J3 == doctest::Approx(fam.rho(d)).epsilon(1e-14));
    CHECK(c.J1 == doctest::Approx(fam.tau(d) * c.J3).epsilon(1e-14));
    CHECK(c.U == doctest::Approx(fam.u_ratio * c.J3).epsilon(1e-14));
    CHECK(c.provenance == Provenance::Injected);
  }
}

TEST_CASE("ratio chain: uniform XYZ bonds, no fields, no offset") {
  const double r = 1.3;
  const SpinModel m = xyz_ratio_chain(r, 8);
  CHECK(m.sites == 8);
  CHECK(m.boundary == Boundary::Periodic);
  CHECK(m.bonds.size() == 8);
  CHECK(m.c0 == 0.0);
  CouplingSet c;
  c.J2 = 1.0;
  c.J3 = r;
  c.U = 20.0;
  const auto J = xyz_couplings(c);
  for (const auto& b : m.bonds) {
    CHECK(b.K(0, 0) == doctest::Approx(J[0]).epsilon(1e-14));
    CHECK(b.K(1, 1) == doctest::Approx(J[1]).epsilon(1e-14));
    CHECK(b.K(2, 2) == doctest::Approx(J[2]).epsilon(1e-14));
    CHECK(b.K(0, 1) == 0.0);
  }
  for (const auto& h : m.fields) CHECK(h.norm() == 0.0);

  const SpinModel open = xyz_ratio_chain(r, 8, Boundary::Open);
  CHECK(open.bonds.size() == 7);
  CHECK_THROWS_AS(xyz_ratio_chain(0.0, 8), std::invalid_argument);
}

TEST_CASE("zz coupling crosses -Kxx exactly at the family critical point") {
  const InjectedFamily fam;
  const auto J = xyz_couplings(fam.couplings(fam.critical_d()));
  CHECK(J[2] == doctest::Approx(-J[0]).epsilon(1e-10));
  // AFM side below dc (rho > sqrt(2)), FM side above
  CHECK(xyz_couplings(fam.couplings(1.5))[2] >
        -xyz_couplings(fam.couplings(1.5))[0]);
  CHECK(xyz_couplings(fam.couplings(2.5))[2] <
        -xyz_couplings(fam.couplings(2.5))[0]);
}

TEST_CASE("family model carries anisotropy, fields and the phase policy") {
  const InjectedFamily fam;
  const double d = 2.2;
  const SpinModel m = family_model(fam, d, 8);
  CHECK(m.sites == 8);
  CHECK(m.bonds.size() == 8);
  CHECK(m.c0 == 0.0);

  // generic Theta keeps a finite one-flip field away from the zero
  double field_norm = 0.0;
  for (const auto& h : m.fields) field_norm = std::max(field_norm, h.norm());
  CHECK(field_norm > 1e-3);

  // cross-term policies differ only on the phased bonds
  const SpinModel oracle = family_model(fam, d, 8, 0.48 * kPi,
                                        CrossTerm::Oracle);
  bool any_diff = false;
  for (std::size_t k = 0; k < m.bonds.size(); ++k) {
    const double diff =
        std::abs(m.bonds[k].K(0, 1) - oracle.bonds[k].K(0, 1));
    if (k % 2 == 1) {
      any_diff = any_diff || diff > 1e-6;
    } else {
      CHECK(diff == 0.0);
    }
    CHECK(m.bonds[k].K(0, 0) == oracle.bonds[k].K(0, 0));
    CHECK(m.bonds[k].K(2, 2) == oracle.bonds[k].K(2, 2));
  }
  CHECK(any_diff);
}
