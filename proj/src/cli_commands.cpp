#include "cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "ringmag/config.hpp"
#include "ringmag/csv.hpp"
#include "ringmag/ed.hpp"
#include "ringmag/families.hpp"
#include "ringmag/observables.hpp"
#include "ringmag/pauli.hpp"
#include "ringmag/spin_model.hpp"
#include "ringmag/two_ring.hpp"

namespace ringmag::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

CrossTerm cross_policy(const RunOptions& opt) {
  if (opt.cross_term == "oracle") return CrossTerm::Oracle;
  if (opt.cross_term == "printed") return CrossTerm::Printed;
  throw std::invalid_argument("cross-term must be 'oracle' or 'printed'");
}

std::string out_path(const RunOptions& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

// The manifest doubles as a config file: meta lines are comments, the key
// echo re-parses to the exact run configuration.
void write_manifest(const RunOptions& opt, const KeyValueConfig& cfg,
                    const std::string& subcommand,
                    const std::vector<std::string>& extra = {}) {
  std::ostringstream out;
  out << "# ringmag " << kVersion << "\n";
  out << "# eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
      << EIGEN_MINOR_VERSION << "\n";
  out << "# subcommand " << subcommand << "\n";
  out << "# cross_term " << opt.cross_term << "\n";
  out << "# jobs " << opt.jobs << "\n";
  out << "# seed " << opt.seed << (opt.seed == 0 ? " (module defaults)" : "")
      << "\n";
  for (const auto& line : extra) out << "# " << line << "\n";
  for (const auto& [k, v] : cfg.items()) out << k << " = " << v << "\n";
  atomic_write(out_path(opt, "manifest.txt"), out.str());
}

CouplingSet apply_u_policy(CouplingSet c, const ExperimentConfig& e) {
  if (e.u_policy == UPolicy::Ratio) return with_u_ratio(c, e.u_ratio);
  c.U = e.u_value;
  return c;
}

// Physical or injected couplings for a single-point run.
CouplingSet point_couplings(const ExperimentConfig& e, const RunOptions& opt) {
  if (e.mode == CouplingMode::Inject) {
    CouplingSet c;
    c.J1 = e.inj_J1;
    c.J2 = e.inj_J2;
    c.J3 = e.inj_J3;
    c.l = e.geometry.l;
    c.provenance = Provenance::Injected;
    return apply_u_policy(c, e);
  }
  const SingleRingSolution ring = solve_single_ring(e.geometry.R, e.radial);
  LanczosOptions lo = two_ring_lanczos_defaults();
  if (opt.seed) lo.seed = opt.seed;
  lo.residual_tol = e.solver_tol;
  lo.max_basis = static_cast<int>(e.solver_max_iter);
  const TwoRingSolution sol = solve_two_ring(
      e.geometry.R, e.d_values.front(), e.grid, 8 + 4 * e.geometry.l, lo);
  return apply_u_policy(extract_couplings(sol, ring, e.geometry.l), e);
}

int cmd_couplings_impl(const RunOptions& opt) {
  const KeyValueConfig cfg = KeyValueConfig::load(opt.config_path);
  const ExperimentConfig e = make_experiment_config(cfg);
  if (e.mode != CouplingMode::Solve)
    throw std::invalid_argument("couplings: requires couplings.mode = solve");
  const SingleRingSolution ring = solve_single_ring(e.geometry.R, e.radial);

  struct Row {
    double d = 0.0;
    CouplingSet c;
    bool ok = false;
    std::string err;
  };
  std::vector<Row> rows(e.d_values.size());
  std::atomic<int> failures{0};
  parallel_for(e.d_values.size(), opt.jobs, [&](std::size_t i) {
    rows[i].d = e.d_values[i];
    try {
      LanczosOptions lo = two_ring_lanczos_defaults();
      if (opt.seed) lo.seed = opt.seed;
      lo.residual_tol = e.solver_tol;
      lo.max_basis = static_cast<int>(e.solver_max_iter);
      const TwoRingSolution sol = solve_two_ring(
          e.geometry.R, rows[i].d, e.grid, 8 + 4 * e.geometry.l, lo);
      rows[i].c = apply_u_policy(extract_couplings(sol, ring, e.geometry.l), e);
      rows[i].ok = true;
    } catch (const std::exception& ex) {
      rows[i].err = ex.what();
      ++failures;
    }
  });

  CsvTable t{{"R", "d", "J1", "J2", "J3", "U", "Ec", "E0", "converged"}};
  for (const auto& r : rows) {
    const CouplingSet& c = r.c;
    t.add_row({csv_num(e.geometry.R), csv_num(r.d),
               csv_num(r.ok ? c.J1 : kNan), csv_num(r.ok ? c.J2 : kNan),
               csv_num(r.ok ? c.J3 : kNan), csv_num(r.ok ? c.U : kNan),
               csv_num(ring.Ec), csv_num(ring.E0), r.ok ? "1" : "0"});
  }
  write_csv(out_path(opt, "couplings.csv"), t);

  // trend summary over the successful rows, in d order
  std::vector<const Row*> ok;
  for (const auto& r : rows)
    if (r.ok) ok.push_back(&r);
  std::ostringstream sum;
  sum << "points: " << rows.size() << "  solved: " << ok.size() << "\n";
  if (ok.size() >= 2) {
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
      const double a = std::abs(ok[i]->c.J3 / ok[i]->c.J2 - 1.0);
      const double b = std::abs(ok[i + 1]->c.J3 / ok[i + 1]->c.J2 - 1.0);
      if (b > a) monotone = false;
    }
    sum << "J3/J2: " << csv_num(ok.front()->c.J3 / ok.front()->c.J2) << " -> "
        << csv_num(ok.back()->c.J3 / ok.back()->c.J2)
        << (monotone ? "  (monotone toward 1)" : "  (not monotone)") << "\n";
    for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
      const double a = ok[i]->c.J1 / ok[i]->c.J3;
      const double b = ok[i + 1]->c.J1 / ok[i + 1]->c.J3;
      if (a == 0.0 || a * b < 0.0)
        sum << "J1/J3 sign change between d = " << csv_num(ok[i]->d)
            << " and d = " << csv_num(ok[i + 1]->d) << "\n";
    }
  }
  for (const auto& r : rows)
    if (!r.ok) sum << "failed at d = " << csv_num(r.d) << ": " << r.err << "\n";
  std::cout << sum.str();
  atomic_write(out_path(opt, "summary.txt"), sum.str());
  write_manifest(opt, cfg, "couplings");
  return failures.load() == 0 ? 0 : 2;
}

// Per-pair coupling matrices summed over parallel bonds, so periodic
// two-site chains compare correctly against the numeric reduction.
std::map<std::pair<int, int>, Eigen::Matrix3d> pair_sums(const SpinModel& m) {
  std::map<std::pair<int, int>, Eigen::Matrix3d> out;
  for (const auto& b : m.bonds) {
    const auto key = std::minmax(b.a, b.b);
    auto [it, fresh] = out.emplace(key, Eigen::Matrix3d::Zero().eval());
    if (!fresh)
      it->second += b.K;
    else
      it->second = b.K;
  }
  return out;
}

int cmd_oracle_check_impl(const RunOptions& opt) {
  const KeyValueConfig cfg = KeyValueConfig::load(opt.config_path);
  const ExperimentConfig e = make_experiment_config(cfg);
  if (e.geometry.N > 4)
    throw std::invalid_argument("oracle-check: needs N <= 4");
  const CouplingSet c = point_couplings(e, opt);
  if (!c.strong_coupling_ok())
    std::cout << "warning: max|J|/U = " << csv_num(c.strong_coupling_ratio())
              << " outside the strong-coupling regime\n";

  const BondTable bonds = e.geometry.cell == CellKind::FourSite
                              ? build_four_site_ladder(e.geometry)
                              : build_ladder(e.geometry);
  const BoseHamiltonian bh = build_bose_hamiltonian(bonds, c, e.geometry.N);
  const PauliDecomposition dec =
      pauli_decompose(effective_hamiltonian_numeric(bh), e.geometry.N);

  CsvTable t{{"term", "analytic", "numeric", "absdiff", "policy"}};
  double worst_oracle = 0.0;
  for (const CrossTerm policy : {CrossTerm::Oracle, CrossTerm::Printed}) {
    const std::string tag = policy == CrossTerm::Oracle ? "oracle" : "printed";
    const SpinModel m = assemble_from_bonds(bonds, c, e.geometry.boundary,
                                            policy);
    auto push = [&](const std::string& term, double a, double n) {
      const double diff = std::abs(a - n);
      t.add_row({term, csv_num(a), csv_num(n), csv_num(diff), tag});
      if (policy == CrossTerm::Oracle) worst_oracle = std::max(worst_oracle, diff);
    };
    push("identity", m.c0, dec.c0);
    const char* ax = "xyz";
    for (int j = 0; j < m.sites; ++j)
      for (int a = 0; a < 3; ++a)
        push("site(" + std::to_string(j) + ").h" + ax[a], m.fields[j][a],
             dec.fields[j][a]);
    for (const auto& [key, K] : pair_sums(m)) {
      const std::string b =
          "pair(" + std::to_string(key.first) + "," +
          std::to_string(key.second) + ").";
      const Eigen::Matrix3d Nm = dec.pair(key.first, key.second);
      push(b + "xx", K(0, 0), Nm(0, 0));
      push(b + "yy", K(1, 1), Nm(1, 1));
      push(b + "zz", K(2, 2), Nm(2, 2));
      push(b + "xy", K(0, 1), 0.5 * (Nm(0, 1) + Nm(1, 0)));
      double rest = std::abs(Nm(0, 1) - Nm(1, 0));
      for (const auto [p, q] : {std::pair{0, 2}, {2, 0}, {1, 2}, {2, 1}})
        rest = std::max(rest, std::abs(Nm(p, q)));
      push(b + "rest", 0.0, rest);
    }
  }
  t.add_row({"weight3_residual", "0", csv_num(dec.max_weight3),
             csv_num(dec.max_weight3), "oracle"});
  worst_oracle = std::max(worst_oracle, dec.max_weight3);
  write_csv(out_path(opt, "oracle_check.csv"), t);

  const double gate = 1e-12 * c.U;
  std::cout << "max oracle-policy deviation: " << csv_num(worst_oracle)
            << "  gate: " << csv_num(gate) << "  "
            << (worst_oracle <= gate ? "pass" : "FAIL") << "\n";
  write_manifest(opt, cfg, "oracle-check");
  return worst_oracle <= gate ? 0 : 3;
}

int cmd_phase_scan_impl(const RunOptions& opt) {
  const KeyValueConfig cfg = KeyValueConfig::load(opt.config_path);
  const std::string family_name = cfg.str_or("scan.family", "ratio");
  const std::vector<double> grid = cfg.range("scan.range");
  std::vector<int> sizes{8, 10, 12};
  if (cfg.has("scan.sizes")) sizes = cfg.integers("scan.sizes");
  if (grid.size() < 8)
    throw std::invalid_argument("phase-scan: scan.range needs >= 8 points");
  for (const int n : sizes)
    if (n < 4 || n > 16 || n % 2)
      throw std::invalid_argument("phase-scan: sizes must be even, 4..16");

  ModelFamily family;
  if (family_name == "ratio") {
    const double u = cfg.number_or("scan.u", 20.0);
    family = [u](double r, int N) {
      return xyz_ratio_chain(r, N, Boundary::Periodic, 1.0, u);
    };
  } else if (family_name == "distance") {
    InjectedFamily fam;
    const double theta =
        cfg.has("geometry.Theta") ? cfg.angle("geometry.Theta") : 0.48 * kPi;
    const CrossTerm policy = cross_policy(opt);
    family = [fam, theta, policy](double d, int N) {
      return family_model(fam, d, N, theta, policy);
    };
  } else {
    throw std::invalid_argument(
        "phase-scan: scan.family must be ratio or distance");
  }
  const int gap_index = static_cast<int>(
      cfg.integer_or("scan.gap_index", family_name == "ratio" ? 2 : 1));

  EdOptions ed;
  ed.k = gap_index + 1;
  ed.residual_tol = cfg.number_or("solver.tol", ed.residual_tol);
  if (opt.seed) ed.seed = opt.seed;

  // per-point scan with failure collection; partial results still land
  const std::size_t np = grid.size();
  std::vector<std::vector<double>> dn(sizes.size()),
      dabs(sizes.size());
  for (auto& v : dn) v.assign(np, kNan);
  for (auto& v : dabs) v.assign(np, kNan);
  std::atomic<int> failures{0};
  parallel_for(sizes.size() * np, opt.jobs, [&](std::size_t idx) {
    const std::size_t s = idx / np, g = idx % np;
    try {
      const SpectrumResult r = lowest_eigenpairs(family(grid[g], sizes[s]), ed);
      const double delta = std::max(0.0, r.values[gap_index] - r.values[0]);
      dabs[s][g] = delta;
      dn[s][g] = delta * sizes[s];
    } catch (const std::exception&) {
      ++failures;
    }
  });

  CsvTable gt{{"N", "t", "delta", "delta_n"}};
  for (std::size_t s = 0; s < sizes.size(); ++s)
    for (std::size_t g = 0; g < np; ++g)
      gt.add_row({std::to_string(sizes[s]), csv_num(grid[g]),
                  csv_num(dabs[s][g]), csv_num(dn[s][g])});
  write_csv(out_path(opt, "gap_curves.csv"), gt);

  std::ostringstream sum;
  sum << "family = " << family_name << "\n";
  sum << "gap level index = " << gap_index << "\n";
  sum << "range = " << csv_num(grid.front()) << " .. " << csv_num(grid.back())
      << " (" << np << " points)\n";
  int exit_code = 0;
  if (failures.load() != 0) {
    sum << "failed points: " << failures.load()
        << " (crossing analysis skipped)\n";
    exit_code = 2;
  } else {
    std::vector<GapCurve> curves(sizes.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      curves[s].N = sizes[s];
      curves[s].t = grid;
      curves[s].delta_n = dn[s];
    }
    const CrossingReport rep = find_crossing(curves);
    CsvTable ct{{"n_small", "n_large", "t"}};
    for (const auto& p : rep.pairs)
      ct.add_row({std::to_string(p.n_small), std::to_string(p.n_large),
                  csv_num(p.t)});
    write_csv(out_path(opt, "crossings.csv"), ct);
    sum << "classification = " << rep.classification << "\n";
    for (std::size_t i = 0; i < rep.clusters.size(); ++i)
      sum << "transition " << i + 1 << " near t = "
          << csv_num(rep.clusters[i].location)
          << " (spread " << csv_num(rep.clusters[i].spread) << ", "
          << rep.clusters[i].members.size() << " pair estimates)\n";
    if (rep.clusters.empty()) sum << "no transition detected in range\n";
    if (family_name == "distance") {
      const InjectedFamily fam;
      sum << "one-flip field zero of the family at d = "
          << csv_num(fam.field_zero_d()) << "\n";
    }

    if (cfg.flag_or("scan.correlate", family_name == "ratio")) {
      const int nc = static_cast<int>(cfg.integer_or("scan.correlation_size",
                                                     12));
      try {
        const CorrelationScan cs =
            correlation_crossover(family, nc, grid, -1, -1, opt.jobs, ed);
        CsvTable xt{{"t", "czz", "cxx"}};
        for (std::size_t g = 0; g < np; ++g)
          xt.add_row({csv_num(cs.t[g]), csv_num(cs.czz[g]),
                      csv_num(cs.cxx[g])});
        write_csv(out_path(opt, "correlation.csv"), xt);
        sum << "correlation equality (N = " << nc << ") at t = "
            << csv_num(cs.equality) << "\n";
        if (!rep.clusters.empty())
          sum << "|crossing - equality| = "
              << csv_num(std::abs(rep.location - cs.equality)) << "\n";
      } catch (const std::exception& ex) {
        sum << "correlation scan: " << ex.what() << "\n";
      }
    }
  }
  std::cout << sum.str();
  atomic_write(out_path(opt, "summary.txt"), sum.str());
  write_manifest(opt, cfg, "phase-scan");
  return exit_code;
}

int cmd_spectrum_impl(const RunOptions& opt) {
  const KeyValueConfig cfg = KeyValueConfig::load(opt.config_path);
  const ExperimentConfig e = make_experiment_config(cfg);
  const CouplingSet c = point_couplings(e, opt);
  RingGeometry g = e.geometry;
  g.d = e.d_values.front();
  const SpinModel m = assemble_general(g, c, cross_policy(opt));

  EdOptions ed;
  ed.k = static_cast<int>(cfg.integer_or("spectrum.k", 8));
  ed.residual_tol = cfg.number_or("solver.tol", ed.residual_tol);
  if (opt.seed) ed.seed = opt.seed;
  const std::string method = cfg.str_or("spectrum.method", "auto");
  if (method == "dense") {
    ed.method = EdMethod::Dense;
  } else if (method == "iterative") {
    ed.method = EdMethod::Iterative;
  } else if (method != "auto") {
    throw std::invalid_argument("spectrum.method must be auto, dense or iterative");
  }
  const SpectrumResult r = lowest_eigenpairs(m, ed);

  CsvTable t{{"index", "energy", "residual"}};
  for (Eigen::Index i = 0; i < r.values.size(); ++i)
    t.add_row({std::to_string(i), csv_num(r.values[i]),
               csv_num(r.residuals[i])});
  write_csv(out_path(opt, "spectrum.csv"), t);
  std::cout << "E0 = " << csv_num(r.values[0]) << "  gap = " << csv_num(r.gap)
            << "  method = " << (r.dense ? "dense" : "iterative") << "\n";
  write_manifest(opt, cfg, "spectrum");
  return 0;
}

template <class Body>
int guarded(const RunOptions& opt, Body&& body) {
  try {
    std::filesystem::create_directories(opt.out_dir);
    return body(opt);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_couplings(const RunOptions& opt) {
  return guarded(opt, cmd_couplings_impl);
}
int cmd_oracle_check(const RunOptions& opt) {
  return guarded(opt, cmd_oracle_check_impl);
}
int cmd_phase_scan(const RunOptions& opt) {
  return guarded(opt, cmd_phase_scan_impl);
}
int cmd_spectrum(const RunOptions& opt) {
  return guarded(opt, cmd_spectrum_impl);
}

}  // namespace ringmag::cli
