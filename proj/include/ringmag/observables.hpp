#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringmag/ed.hpp"
#include "ringmag/parallel.hpp"
#include "ringmag/radial.hpp"
#include "ringmag/spin_model.hpp"

namespace ringmag {

// One finite-size-scaling curve: Delta * N over the scan parameter.
struct GapCurve {
  int N = 0;
  std::vector<double> t;
  std::vector<double> delta_n;
  std::string provenance;
};

// family(t, N) must return a diagonalizable model for every requested point.
using ModelFamily = std::function<SpinModel(double, int)>;

struct GapScanOptions {
  int gap_index = 1;  // Delta = E_gap_index - E0
  int jobs = 1;
  EdOptions ed;
};

inline std::vector<GapCurve> gap_scan(const ModelFamily& family,
                                      const std::vector<int>& sizes,
                                      const std::vector<double>& grid,
                                      GapScanOptions opt = {}) {
  if (sizes.size() < 2) throw std::invalid_argument("gap_scan: need >= 2 sizes");
  if (grid.size() < 8)
    throw std::invalid_argument("gap_scan: need >= 8 scan points");
  if (opt.gap_index < 1) throw std::invalid_argument("gap_scan: bad gap index");
  std::vector<GapCurve> curves(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    curves[s].N = sizes[s];
    curves[s].t = grid;
    curves[s].delta_n.assign(grid.size(), 0.0);
  }
  EdOptions ed = opt.ed;
  ed.k = opt.gap_index + 1;
  parallel_for(sizes.size() * grid.size(), opt.jobs, [&](std::size_t idx) {
    const std::size_t s = idx / grid.size();
    const std::size_t g = idx % grid.size();
    const SpectrumResult r =
        lowest_eigenpairs(family(grid[g], sizes[s]), ed);
    double delta = r.values[opt.gap_index] - r.values[0];
    if (delta < -1e-10)
      throw std::runtime_error("gap_scan: negative gap beyond tolerance");
    delta = std::max(delta, 0.0);
    curves[s].delta_n[g] = delta * sizes[s];
  });
  return curves;
}

struct PairCrossing {
  int n_small = 0;
  int n_large = 0;
  double t = 0.0;
};

struct CrossingCluster {
  double location = 0.0;
  double spread = 0.0;  // max deviation of members from the location
  std::vector<PairCrossing> members;
};

struct CrossingReport {
  std::vector<PairCrossing> pairs;      // every interpolated sign change
  std::vector<CrossingCluster> clusters;  // grouped by proximity
  std::string classification;           // none | single | multiple
  double location = 0.0;                // first cluster
  double spread = 0.0;
};

// Pairwise linear interpolation of sign changes of Delta*N differences;
// estimates within cluster_width grid steps of each other count as one
// crossing.
inline CrossingReport find_crossing(const std::vector<GapCurve>& curves,
                                    int cluster_width = 5) {
  if (curves.size() < 2)
    throw std::invalid_argument("find_crossing: need >= 2 curves");
  const auto& t = curves.front().t;
  for (const auto& c : curves)
    if (c.t != t)
      throw std::invalid_argument("find_crossing: curves on different grids");
  CrossingReport rep;
  for (std::size_t a = 0; a + 1 < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        const double f0 = curves[a].delta_n[k] - curves[b].delta_n[k];
        const double f1 = curves[a].delta_n[k + 1] - curves[b].delta_n[k + 1];
        if (f0 == 0.0 && f1 == 0.0) continue;
        if (f0 == 0.0 || f0 * f1 < 0.0) {
          PairCrossing pc;
          pc.n_small = std::min(curves[a].N, curves[b].N);
          pc.n_large = std::max(curves[a].N, curves[b].N);
          pc.t = f0 == 0.0 ? t[k] : t[k] - f0 * (t[k + 1] - t[k]) / (f1 - f0);
          rep.pairs.push_back(pc);
        }
      }
    }
  if (rep.pairs.empty()) {
    rep.classification = "none";
    return rep;
  }
  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const PairCrossing& x, const PairCrossing& y) { return x.t < y.t; });
  double step = t.size() > 1 ? (t.back() - t.front()) / (t.size() - 1) : 1.0;
  const double width = cluster_width * step;
  for (const auto& pc : rep.pairs) {
    if (rep.clusters.empty() || pc.t - rep.clusters.back().members.back().t > width)
      rep.clusters.push_back({});
    rep.clusters.back().members.push_back(pc);
  }
  for (auto& cl : rep.clusters) {
    double sum = 0.0;
    for (const auto& pc : cl.members) sum += pc.t;
    cl.location = sum / cl.members.size();
    for (const auto& pc : cl.members)
      cl.spread = std::max(cl.spread, std::abs(pc.t - cl.location));
  }
  rep.location = rep.clusters.front().location;
  rep.spread = rep.clusters.front().spread;
  rep.classification = rep.clusters.size() == 1 ? "single" : "multiple";
  return rep;
}

struct CorrelationScan {
  std::vector<double> t;
  std::vector<double> czz;
  std::vector<double> cxx;
  double equality = 0.0;  // interpolated C_zz = C_xx location
};

// Scans the ground-state correlators over the family and interpolates the
// point where the zz and xx probes coincide. Probe pair defaults to maximal
// separation (0, N/2).
inline CorrelationScan correlation_crossover(const ModelFamily& family, int N,
                                             const std::vector<double>& grid,
                                             int i = -1, int j = -1,
                                             int jobs = 1,
                                             EdOptions ed = {}) {
  if (N < 8) throw std::invalid_argument("correlation_crossover: N >= 8");
  if (i < 0) i = 0;
  if (j < 0) j = N / 2;
  CorrelationScan scan;
  scan.t = grid;
  scan.czz.assign(grid.size(), 0.0);
  scan.cxx.assign(grid.size(), 0.0);
  ed.k = std::max(ed.k, 2);
  parallel_for(grid.size(), jobs, [&](std::size_t g) {
    const SpectrumResult r = lowest_eigenpairs(family(grid[g], N), ed);
    const VectorXcd v = r.vectors.col(0);
    scan.czz[g] = correlator(v, N, 2, i, j);
    scan.cxx[g] = correlator(v, N, 0, i, j);
  });
  bool found = false;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double f0 = scan.czz[k] - scan.cxx[k];
    const double f1 = scan.czz[k + 1] - scan.cxx[k + 1];
    if (f0 == 0.0 || f0 * f1 < 0.0) {
      scan.equality =
          f0 == 0.0 ? grid[k]
                    : grid[k] - f0 * (grid[k + 1] - grid[k]) / (f1 - f0);
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error(
        "correlation_crossover: C_zz - C_xx does not change sign in range");
  return scan;
}

enum class PhaseLabel { ZAfm, XFm, Undetermined };

inline std::string to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::ZAfm: return "z-AFM";
    case PhaseLabel::XFm: return "x-FM";
    default: return "undetermined";
  }
}

// Orders the ground state by its dominant long-distance correlation:
// staggered zz versus uniform xx at the maximal probe separation.
inline PhaseLabel classify_phase(const VectorXcd& ground, int N,
                                 double eps = 0.05) {
  const int i = 0, j = N / 2;
  const double stagger = (j - i) % 2 == 0 ? 1.0 : -1.0;
  const double szz = stagger * correlator(ground, N, 2, i, j);
  const double cxx = correlator(ground, N, 0, i, j);
  if (szz > cxx + eps) return PhaseLabel::ZAfm;
  if (cxx > szz + eps) return PhaseLabel::XFm;
  return PhaseLabel::Undetermined;
}

struct AnharmonicityReport {
  double ratio = 0.0;  // Ec / U
  bool stable = false; // manifold protected when >= 10
};

inline AnharmonicityReport anharmonicity_ratio(const SingleRingSolution& sol,
                                               double g) {
  if (g <= 0.0) throw std::invalid_argument("anharmonicity_ratio: g <= 0");
  AnharmonicityReport rep;
  rep.ratio = sol.Ec / (g * sol.U_over_g);
  rep.stable = rep.ratio >= 10.0;
  return rep;
}

}  // namespace ringmag
