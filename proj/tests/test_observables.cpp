#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ringmag/families.hpp"
#include "ringmag/observables.hpp"
#include "ringmag/two_ring.hpp"

using namespace ringmag;

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

GapCurve synthetic_curve(int N, const std::vector<double>& t,
                         const std::function<double(double)>& f) {
  GapCurve c;
  c.N = N;
  c.t = t;
  for (const double x : t) c.delta_n.push_back(f(x));
  return c;
}

}  // namespace

TEST_CASE("crossing finder pins a common intersection exactly") {
  const auto t = linear_grid(0.0, 1.0, 11);
  std::vector<GapCurve> curves;
  for (const int N : {8, 10, 12})
    curves.push_back(
        synthetic_curve(N, t, [N](double x) { return N * (x - 0.3); }));
  const CrossingReport rep = find_crossing(curves);
  CHECK(rep.classification == "single");
  CHECK(rep.pairs.size() == 3);
  CHECK(rep.location == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rep.spread < 1e-12);
  CHECK(rep.clusters.size() == 1);
  CHECK(rep.clusters.front().members.front().n_small == 8);
}

TEST_CASE("parallel curves never cross") {
  const auto t = linear_grid(0.0, 1.0, 11);
  std::vector<GapCurve> curves;
  curves.push_back(synthetic_curve(8, t, [](double x) { return x + 1.0; }));
  curves.push_back(synthetic_curve(10, t, [](double x) { return x + 2.0; }));
  const CrossingReport rep = find_crossing(curves);
  CHECK(rep.classification == "none");
  CHECK(rep.pairs.empty());
}

TEST_CASE("well-separated zeros form distinct clusters") {
  const auto t = linear_grid(0.0, 1.0, 11);
  std::vector<GapCurve> curves;
  curves.push_back(synthetic_curve(
      8, t, [](double x) { return (x - 0.2) * (x - 0.8) + 1.0; }));
  curves.push_back(synthetic_curve(10, t, [](double) { return 1.0; }));
  const CrossingReport rep = find_crossing(curves);
  CHECK(rep.classification == "multiple");
  REQUIRE(rep.clusters.size() == 2);
  // both zeros sit on grid nodes, so interpolation is exact and each is
  // recorded once
  CHECK(rep.pairs.size() == 2);
  CHECK(rep.clusters[0].location == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.clusters[1].location == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("flat-zero stretches are not double counted") {
  const auto t = linear_grid(0.0, 0.7, 8);
  auto plateau = [](double x) {
    if (x < 0.19) return 0.3;
    if (x < 0.31) return 0.0;  // zero at the 0.2 and 0.3 nodes
    return 0.5;
  };
  std::vector<GapCurve> curves;
  curves.push_back(synthetic_curve(8, t, plateau));
  curves.push_back(synthetic_curve(10, t, [](double) { return 0.0; }));
  const CrossingReport rep = find_crossing(curves);
  CHECK(rep.pairs.size() == 1);
  CHECK(rep.location == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("crossing finder rejects mismatched grids") {
  std::vector<GapCurve> curves;
  curves.push_back(synthetic_curve(8, linear_grid(0, 1, 11),
                                   [](double x) { return x; }));
  curves.push_back(synthetic_curve(10, linear_grid(0, 1, 9),
                                   [](double x) { return x; }));
  CHECK_THROWS_AS(find_crossing(curves), std::invalid_argument);
  curves.pop_back();
  CHECK_THROWS_AS(find_crossing(curves), std::invalid_argument);
}

TEST_CASE("phase classification from product states") {
  const int N = 8;
  const Eigen::Index dim = Eigen::Index(1) << N;

  VectorXcd neel = VectorXcd::Zero(dim);
  neel[0b01010101] = 1.0;
  CHECK(classify_phase(neel, N) == PhaseLabel::ZAfm);

  VectorXcd xpol = VectorXcd::Constant(dim, 1.0 / std::sqrt(double(dim)));
  CHECK(classify_phase(xpol, N) == PhaseLabel::XFm);

  VectorXcd ypol(dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const int ones = std::popcount(static_cast<std::uint64_t>(m));
    ypol[m] = std::pow(Complex(0, 1), ones) / std::sqrt(double(dim));
  }
  CHECK(classify_phase(ypol, N) == PhaseLabel::Undetermined);

  CHECK(to_string(PhaseLabel::ZAfm) == "z-AFM");
  CHECK(to_string(PhaseLabel::XFm) == "x-FM");
}

TEST_CASE("gap scan produces positive scaled gaps on the ratio family") {
  const ModelFamily family = [](double r, int n) {
    return xyz_ratio_chain(r, n);
  };
  const auto grid = linear_grid(1.40, 1.43, 8);
  GapScanOptions opt;
  opt.gap_index = 2;
  const auto curves = gap_scan(family, {8, 10}, grid, opt);
  REQUIRE(curves.size() == 2);
  for (const auto& c : curves) {
    CHECK(c.t == grid);
    REQUIRE(c.delta_n.size() == grid.size());
    for (const double v : c.delta_n) CHECK(v > 0.0);
  }

  CHECK_THROWS_AS(gap_scan(family, {8}, grid, opt), std::invalid_argument);
  CHECK_THROWS_AS(gap_scan(family, {8, 10}, linear_grid(1.40, 1.43, 7), opt),
                  std::invalid_argument);
  GapScanOptions bad;
  bad.gap_index = 0;
  CHECK_THROWS_AS(gap_scan(family, {8, 10}, grid, bad), std::invalid_argument);
}

TEST_CASE("correlator equality point sits at the coupling-ratio crossing") {
  const ModelFamily family = [](double r, int n) {
    return xyz_ratio_chain(r, n);
  };
  const auto grid = linear_grid(1.40, 1.43, 13);
  const CorrelationScan scan = correlation_crossover(family, 8, grid);
  CHECK(scan.czz.size() == grid.size());
  CHECK(scan.cxx.size() == grid.size());
  CHECK(std::abs(scan.equality - std::sqrt(2.0)) < 0.002);

  CHECK_THROWS_AS(correlation_crossover(family, 6, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation_crossover(family, 8, linear_grid(1.5, 1.6, 9)),
                  std::runtime_error);
}

TEST_CASE("anharmonicity ratio flags unprotected manifolds") {
  SingleRingSolution sol;
  sol.Ec = 1.0;
  sol.U_over_g = 0.1;
  CHECK(anharmonicity_ratio(sol, 1.0).ratio == doctest::Approx(10.0));
  CHECK(anharmonicity_ratio(sol, 1.0).stable);
  CHECK(anharmonicity_ratio(sol, 2.0).ratio == doctest::Approx(5.0));
  CHECK(!anharmonicity_ratio(sol, 2.0).stable);
  CHECK_THROWS_AS(anharmonicity_ratio(sol, 0.0), std::invalid_argument);
}

TEST_CASE("tight rings are not protected at the working interaction strength") {
  const SingleRingSolution ring = solve_single_ring(2.5);
  CouplingSet c;
  c.J2 = 0.023577594319439260;  // solved couplings at R = 2.5, d = 2
  c.J3 = 0.032662846617715874;
  const double g = g_for_u_ratio(ring, c, 20.0);
  const AnharmonicityReport rep = anharmonicity_ratio(ring, g);
  CHECK(rep.ratio > 0.2);
  CHECK(rep.ratio < 0.35);
  CHECK(!rep.stable);
}
