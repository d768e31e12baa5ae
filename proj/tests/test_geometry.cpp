#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ringmag/geometry.hpp"

using namespace ringmag;

TEST_CASE("geometry validation rejects malformed descriptions") {
  RingGeometry g;
  CHECK_NOTHROW(g.validate());

  RingGeometry bad = g;
  bad.R = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.d = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.l = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.N = 5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.N = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.Theta = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.Theta = 1.01 * kPi;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Theta at or below pi/3 needs the explicit opt-in.
  bad = g;
  bad.Theta = kPi / 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.allow_small_angle = true;
  CHECK_NOTHROW(bad.validate());

  bad = g;
  bad.cell = CellKind::FourSite;
  bad.N = 6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.N = 8;
  CHECK_NOTHROW(bad.validate());

  // wrapping two sites would put two bonds on the same pair
  bad = g;
  bad.N = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.boundary = Boundary::Open;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("bond phase is 2 l Theta wrapped into [0, 2 pi)") {
  RingGeometry g;
  g.l = 1;
  g.Theta = 0.48 * kPi;
  CHECK(g.bond_phase() == doctest::Approx(0.96 * kPi).epsilon(1e-14));

  g.l = 2;
  g.Theta = 0.9 * kPi;  // 2*2*0.9 pi = 3.6 pi -> 1.6 pi
  CHECK(g.bond_phase() == doctest::Approx(1.6 * kPi).epsilon(1e-12));

  g.l = 1;
  g.Theta = kPi;  // 2 pi wraps to 0
  CHECK(g.bond_phase() == doctest::Approx(0.0).scale(1.0));

  // the four-site cell pins the effective angle at pi/2
  g.cell = CellKind::FourSite;
  g.Theta = 0.7 * kPi;
  CHECK(g.effective_theta() == doctest::Approx(kPi / 2));
  CHECK(g.bond_phase() == doctest::Approx(kPi));
}

TEST_CASE("two-site ladder alternates tags and phases") {
  RingGeometry g;
  g.N = 8;
  g.l = 1;
  g.Theta = 0.48 * kPi;
  const BondTable t = build_ladder(g);
  CHECK(t.sites == 8);
  REQUIRE(t.bonds.size() == 8);
  const double chi = g.bond_phase();
  for (int k = 0; k < 8; ++k) {
    const Bond& b = t.bonds[k];
    CHECK(b.a == k);
    CHECK(b.b == (k + 1) % 8);
    if (k % 2 == 0) {
      CHECK(b.tag == BondTag::InCell);
      CHECK(b.chi == 0.0);
    } else {
      CHECK(b.tag == BondTag::CrossCell);
      CHECK(b.chi == doctest::Approx(chi));
    }
  }

  g.boundary = Boundary::Open;
  CHECK(build_ladder(g).bonds.size() == 7);

  g.cell = CellKind::FourSite;
  g.boundary = Boundary::Periodic;
  CHECK_THROWS_AS(build_ladder(g), std::invalid_argument);
}

TEST_CASE("periodic phase sum is N l Theta modulo 2 pi") {
  for (int l : {1, 2}) {
    for (double frac : {0.4, 0.48, 0.5, 0.75, 1.0}) {
      RingGeometry g;
      g.N = 8;
      g.l = l;
      g.Theta = frac * kPi;
      const double total = build_ladder(g).phase_sum();
      const double expect = g.N * l * g.Theta;
      const double twopi = 2.0 * kPi;
      double miss = std::fmod(total - expect, twopi);
      if (miss < 0) miss += twopi;
      miss = std::min(miss, twopi - miss);
      CHECK(miss == doctest::Approx(0.0).scale(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("four-site ladder carries phase l pi on the second half of the cell") {
  RingGeometry g;
  g.cell = CellKind::FourSite;
  g.N = 8;
  g.l = 1;
  const BondTable t = build_four_site_ladder(g);
  REQUIRE(t.bonds.size() == 8);
  for (int k = 0; k < 8; ++k) {
    const Bond& b = t.bonds[k];
    const bool cross = k % 4 >= 2;  // A-B B-C C-D D-A'
    CHECK(b.tag == (cross ? BondTag::CrossCell : BondTag::InCell));
    CHECK(b.chi == doctest::Approx(cross ? kPi : 0.0).scale(1.0));
  }
  g.cell = CellKind::TwoSite;
  CHECK_THROWS_AS(build_four_site_ladder(g), std::invalid_argument);
}

TEST_CASE("alternate gauge moves every phase onto in-cell links") {
  RingGeometry g;
  g.N = 6;
  g.Theta = 0.48 * kPi;
  const BondTable a = build_ladder(g);
  const BondTable b = build_ladder_alternate_gauge(g);
  REQUIRE(a.bonds.size() == b.bonds.size());
  const double chi = g.bond_phase();
  for (std::size_t k = 0; k < a.bonds.size(); ++k) {
    CHECK(a.bonds[k].tag == b.bonds[k].tag);
    if (b.bonds[k].tag == BondTag::InCell)
      CHECK(b.bonds[k].chi == doctest::Approx(chi));
    else
      CHECK(b.bonds[k].chi == 0.0);
  }
}
