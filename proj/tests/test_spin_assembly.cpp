#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ringmag/ed.hpp"
#include "ringmag/geometry.hpp"
#include "ringmag/spin_model.hpp"

using namespace ringmag;

namespace {

CouplingSet make_couplings(double j1, double j2, double j3, double u) {
  CouplingSet c;
  c.J1 = j1;
  c.J2 = j2;
  c.J3 = j3;
  c.U = u;
  return c;
}

RingGeometry ring(int n, double theta, int l = 1,
                  Boundary bc = Boundary::Periodic) {
  RingGeometry g;
  g.N = n;
  g.Theta = theta;
  g.l = l;
  g.boundary = bc;
  return g;
}

double dense_diff(const SpinModel& a, const SpinModel& b) {
  return (dense_matrix(a) - dense_matrix(b)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("closed-form couplings at the zero-field angle") {
  const auto j2only = xyz_couplings(make_couplings(0, 0.1, 0, 1));
  CHECK(j2only[0] == doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(j2only[1] == doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(j2only[2] == doctest::Approx(-0.015).epsilon(1e-14));

  const auto j3only = xyz_couplings(make_couplings(0, 0, 0.1, 1));
  CHECK(j3only[0] == doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(j3only[1] == doctest::Approx(+0.005).epsilon(1e-14));
  CHECK(j3only[2] == doctest::Approx(+0.015).epsilon(1e-14));

  // at J3/J2 = sqrt(2) the zz coupling equals -Kxx: the level-crossing point
  const auto at_root2 =
      xyz_couplings(make_couplings(0, 1.0, std::sqrt(2.0), 10.0));
  CHECK(at_root2[2] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(at_root2[2] == doctest::Approx(-at_root2[0]).epsilon(1e-14));

  CHECK_THROWS_AS(xyz_couplings(make_couplings(0, 1, 1, 0)),
                  std::invalid_argument);
  CHECK(field_coupling(make_couplings(0.05, 1, 2, 10)) ==
        doctest::Approx(0.1 - 1.2).epsilon(1e-14));
  CHECK(bond_offset(make_couplings(0, 0.1, 0.2, 1)) ==
        doctest::Approx(-0.125).epsilon(1e-14));
}

TEST_CASE("zero-field chain: uniform diagonal bonds, no fields") {
  const CouplingSet c = make_couplings(0.07, 0.3, 0.4, 5.0);
  const SpinModel m = assemble_xyz(ring(6, kPi / 2), c);
  m.require_valid();
  CHECK(m.sites == 6);
  CHECK(m.bonds.size() == 6);
  const auto J = xyz_couplings(c);
  for (const auto& b : m.bonds) {
    CHECK(b.K(0, 0) == J[0]);
    CHECK(b.K(1, 1) == J[1]);
    CHECK(b.K(2, 2) == J[2]);
    CHECK(b.K.cwiseAbs().sum() ==
          doctest::Approx(std::abs(J[0]) + std::abs(J[1]) + std::abs(J[2])));
  }
  for (const auto& h : m.fields) CHECK(h.norm() == 0.0);
  CHECK(m.c0 == doctest::Approx(6.0 * bond_offset(c)).epsilon(1e-14));
  CHECK(assemble_xyz(ring(6, kPi / 2), c, false).c0 == 0.0);

  CHECK_THROWS_AS(assemble_xyz(ring(6, 0.48 * kPi), c), std::invalid_argument);
}

TEST_CASE("uniform-field chain: bulk field h, half at open edges") {
  const CouplingSet c = make_couplings(0.05, 0.3, 0.4, 5.0);
  const double h = field_coupling(c);
  const SpinModel per = assemble_xyz_field(ring(6, kPi), c);
  for (const auto& f : per.fields) {
    CHECK(f[0] == doctest::Approx(h).epsilon(1e-14));
    CHECK(f[1] == 0.0);
    CHECK(f[2] == 0.0);
  }
  const SpinModel open = assemble_xyz_field(ring(6, kPi, 1, Boundary::Open), c);
  CHECK(open.bonds.size() == 5);
  CHECK(open.fields.front()[0] == doctest::Approx(0.5 * h).epsilon(1e-14));
  CHECK(open.fields.back()[0] == doctest::Approx(0.5 * h).epsilon(1e-14));
  for (int j = 1; j < 5; ++j)
    CHECK(open.fields[j][0] == doctest::Approx(h).epsilon(1e-14));

  CHECK_THROWS_AS(assemble_xyz_field(ring(6, kPi / 2), c),
                  std::invalid_argument);
}

TEST_CASE("four-site cell: staggered field pattern 0 +h 0 -h") {
  const CouplingSet c = make_couplings(0.05, 0.3, 0.4, 5.0);
  const double h = field_coupling(c);
  RingGeometry g = ring(8, kPi / 2);
  g.cell = CellKind::FourSite;
  const SpinModel m = assemble_staggered(g, c);
  REQUIRE(m.sites == 8);
  const double expect[4] = {0.0, h, 0.0, -h};
  for (int j = 0; j < 8; ++j) {
    CHECK(m.fields[j][0] == doctest::Approx(expect[j % 4]).epsilon(1e-14));
    CHECK(m.fields[j][1] == 0.0);
  }

  RingGeometry go = g;
  go.boundary = Boundary::Open;
  const SpinModel mo = assemble_staggered(go, c);
  CHECK(mo.bonds.size() == 7);
  // edge sites keep only one bond factor: +h/2 at the in-cell end, -h/2 at
  // the phased end
  CHECK(mo.fields.front()[0] == doctest::Approx(0.5 * h).epsilon(1e-12));
  CHECK(mo.fields.back()[0] == doctest::Approx(-0.5 * h).epsilon(1e-12));
  CHECK(std::abs(mo.fields.back()[1]) < 1e-14);

  RingGeometry bad = g;
  bad.cell = CellKind::TwoSite;
  CHECK_THROWS_AS(assemble_staggered(bad, c), std::invalid_argument);
  bad = g;
  bad.l = 2;
  CHECK_THROWS_AS(assemble_staggered(bad, c), std::invalid_argument);
}

TEST_CASE("general assembler restricts to the special-angle chains") {
  const CouplingSet c = make_couplings(0.05, 0.3, 0.4, 5.0);

  // l Theta = pi/2: phases double to pi, fields cancel, cross term vanishes
  const RingGeometry gx = ring(6, kPi / 2);
  CHECK(dense_diff(assemble_general(gx, c), assemble_xyz(gx, c)) < 1e-14);

  // l Theta = pi: phases wrap to zero, every site sees the full factor 2
  const RingGeometry gf = ring(6, kPi);
  CHECK(dense_diff(assemble_general(gf, c), assemble_xyz_field(gf, c)) <
        1e-14);

  // four-site cell at l = 1 reproduces the staggered pattern
  RingGeometry gs = ring(8, kPi / 2);
  gs.cell = CellKind::FourSite;
  CHECK(dense_diff(assemble_general(gs, c), assemble_staggered(gs, c)) <
        1e-14);
}

TEST_CASE("uniform scaling of all microscopic couplings scales the model") {
  const double lambda = 2.5;
  const CouplingSet c = make_couplings(0.04, 0.3, 0.45, 6.0);
  const CouplingSet cs = make_couplings(lambda * 0.04, lambda * 0.3,
                                        lambda * 0.45, lambda * 6.0);
  const RingGeometry g = ring(4, 0.48 * kPi);
  const MatrixXcd a = dense_matrix(assemble_general(g, c));
  const MatrixXcd b = dense_matrix(assemble_general(g, cs));
  CHECK((b - lambda * a).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("special-angle predicates and snapping") {
  CHECK(is_xyz_angle(ring(4, kPi / 2)));
  CHECK(!is_field_angle(ring(4, kPi / 2)));
  CHECK(is_field_angle(ring(4, kPi)));
  CHECK(!is_xyz_angle(ring(4, kPi)));
  CHECK(is_xyz_angle(ring(4, kPi / 2, 3)));
  CHECK(!is_field_angle(ring(4, kPi / 2, 3)));
  CHECK(!is_xyz_angle(ring(4, 0.48 * kPi)));
  CHECK(!is_field_angle(ring(4, 0.48 * kPi)));

  RingGeometry near = ring(4, kPi / 2 + 1e-12);
  CHECK(snap_special_angle(near).Theta == kPi / 2);
  CHECK(snap_special_angle(ring(4, 0.48 * kPi)).Theta == 0.48 * kPi);

  RingGeometry l2 = ring(4, kPi / 4 + 1e-12, 2);
  l2.allow_small_angle = true;
  const RingGeometry snapped = snap_special_angle(l2);
  CHECK(snapped.Theta == kPi / 4);
  CHECK(is_xyz_angle(snapped));

  RingGeometry four = ring(8, kPi / 2 + 1e-12);
  four.cell = CellKind::FourSite;
  CHECK(snap_special_angle(four).Theta == four.Theta);
}

TEST_CASE("higher circulation reaches the zero-field angle at small Theta") {
  const CouplingSet c = make_couplings(0.0, 0.3, 0.4, 5.0);
  RingGeometry g = ring(6, kPi / 4, 2);
  CHECK_THROWS_AS(assemble_xyz(g, c), std::invalid_argument);
  g.allow_small_angle = true;
  const SpinModel m = assemble_xyz(g, c);
  const auto J = xyz_couplings(c);
  CHECK(m.bonds.front().K(2, 2) == J[2]);
  CHECK(dense_diff(assemble_general(g, c), m) < 1e-14);
}

TEST_CASE("text round trip is bit exact") {
  const CouplingSet c = make_couplings(0.03, 0.3, 0.4, 5.0);
  const SpinModel m =
      assemble_general(ring(4, 0.48 * kPi), c, CrossTerm::Printed);
  const SpinModel r = from_text(to_text(m));
  CHECK(r.sites == m.sites);
  CHECK(r.boundary == m.boundary);
  CHECK(r.c0 == m.c0);
  REQUIRE(r.bonds.size() == m.bonds.size());
  for (std::size_t k = 0; k < m.bonds.size(); ++k) {
    CHECK(r.bonds[k].a == m.bonds[k].a);
    CHECK(r.bonds[k].b == m.bonds[k].b);
    CHECK((r.bonds[k].K - m.bonds[k].K).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int j = 0; j < m.sites; ++j)
    CHECK((r.fields[j] - m.fields[j]).norm() == 0.0);
}

TEST_CASE("serialization rejects malformed input and exotic bonds") {
  CHECK_THROWS_AS(from_text("spinmodel 2\nsites 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(from_text("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(from_text("spinmodel 1\nsites 2\nbonds 0\nsite 5 0 0 0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      from_text("spinmodel 1\nsites 2\nbonds 2\nbond 0 1 0 0 0 0\n"),
      std::invalid_argument);

  SpinModel m;
  m.sites = 2;
  m.fields.assign(2, Eigen::Vector3d::Zero());
  SpinBond b;
  b.a = 0;
  b.b = 1;
  b.K(0, 2) = 0.1;  // xz entry is outside the serializable shape
  m.bonds.push_back(b);
  CHECK_THROWS_AS(to_text(m), std::invalid_argument);
}

TEST_CASE("model validation") {
  SpinModel m;
  CHECK_THROWS_AS(m.require_valid(), std::invalid_argument);
  m.sites = 2;
  CHECK_THROWS_AS(m.require_valid(), std::invalid_argument);
  m.fields.assign(2, Eigen::Vector3d::Zero());
  m.require_valid();
  SpinBond b;
  b.a = 0;
  b.b = 2;
  m.bonds.push_back(b);
  CHECK_THROWS_AS(m.require_valid(), std::invalid_argument);
}
