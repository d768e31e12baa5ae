#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ringmag/lanczos.hpp"
#include "ringmag/pauli.hpp"
#include "ringmag/spin_model.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

// Term list driving the matrix-free action on the 2^N configuration space.
// Bit j of a configuration set <=> site j up.
struct SpinOperator {
  int sites = 0;
  double c0 = 0.0;
  std::vector<PauliString> strings;
  std::vector<double> coeffs;
  bool real_in_z_basis = true;

  std::uint64_t dim() const { return std::uint64_t{1} << sites; }

  template <class Scalar>
  void apply(const Matrix<Scalar>& in, Matrix<Scalar>& out) const {
    if constexpr (!std::is_same_v<Scalar, Complex>)
      if (!real_in_z_basis)
        throw std::logic_error("spinop: model needs the complex engine");
    out = c0 * in;
    const std::uint64_t n = dim();
    for (std::size_t t = 0; t < strings.size(); ++t) {
      const PauliString& s = strings[t];
      const double c = coeffs[t];
      const std::uint64_t fl = s.flips();
      for (Eigen::Index col = 0; col < in.cols(); ++col) {
        auto vin = in.col(col);
        auto vout = out.col(col);
        for (std::uint64_t m = 0; m < n; ++m) {
          const Complex amp = string_amplitude(s, m);
          if constexpr (std::is_same_v<Scalar, Complex>)
            vout[static_cast<Eigen::Index>(m ^ fl)] += c * amp * vin[m];
          else
            vout[static_cast<Eigen::Index>(m ^ fl)] += c * amp.real() * vin[m];
        }
      }
    }
  }

  MatrixXcd dense() const {
    if (sites > 10) throw std::invalid_argument("spinop: dense needs N <= 10");
    const Eigen::Index n = static_cast<Eigen::Index>(dim());
    MatrixXcd H = MatrixXcd::Identity(n, n) * c0;
    for (std::size_t t = 0; t < strings.size(); ++t) {
      const std::uint64_t fl = strings[t].flips();
      for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(n); ++m)
        H(m ^ fl, m) += coeffs[t] * string_amplitude(strings[t], m);
    }
    return H;
  }
};

inline SpinOperator compile_spin_model(const SpinModel& m) {
  m.require_valid();
  SpinOperator op;
  op.sites = m.sites;
  op.c0 = m.c0;
  auto push = [&op](const PauliString& s, double c) {
    if (c == 0.0) return;
    op.strings.push_back(s);
    op.coeffs.push_back(c);
    if (!string_is_real(s)) op.real_in_z_basis = false;
  };
  for (int j = 0; j < m.sites; ++j)
    for (int a = 0; a < 3; ++a) push(single_site_string(a, j), m.fields[j][a]);
  for (const auto& b : m.bonds)
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        push(two_site_string(p, b.a, q, b.b), b.K(p, q));
  return op;
}

inline MatrixXcd dense_matrix(const SpinModel& m) {
  return compile_spin_model(m).dense();
}

enum class EdMethod { Auto, Dense, Iterative };

struct EdOptions {
  int k = 2;
  double tol = 1e-13;           // Ritz stabilization (relative)
  double residual_tol = 1e-10;  // residual gate (relative to spectral scale)
  EdMethod method = EdMethod::Auto;
  std::uint64_t seed = 0x5eedf00d2025ull;
  int block = 4;
  int max_basis = 360;
  double degeneracy_tol = 1e-8;
  int site_cap = 20;
};

struct SpectrumResult {
  VectorXd values;     // ascending, k entries
  MatrixXcd vectors;   // matching columns
  VectorXd residuals;
  double gap = 0.0;    // E1 - E0
  int iterations = 0;
  std::uint64_t seed = 0;
  bool dense = false;
  std::vector<std::vector<int>> clusters;  // groups within degeneracy_tol
};

namespace detail {

inline std::vector<std::vector<int>> degeneracy_clusters(const VectorXd& vals,
                                                         double tol) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < vals.size(); ++i) {
    if (out.empty() || vals[i] - vals[out.back().back()] > tol)
      out.push_back({i});
    else
      out.back().push_back(i);
  }
  return out;
}

template <class Scalar>
SpectrumResult solve_iterative(const SpinOperator& op, const EdOptions& o,
                               int want) {
  LanczosOptions lo;
  lo.k = want;
  lo.k_strict = std::min(o.k, want);  // the +2 overshoot is bookkeeping only
  lo.block = o.block;
  lo.max_basis = o.max_basis;
  lo.tol = o.tol;
  lo.residual_tol = o.residual_tol;
  lo.seed = o.seed;
  auto apply = [&op](const Matrix<Scalar>& in, Matrix<Scalar>& out) {
    op.template apply<Scalar>(in, out);
  };
  const auto r =
      block_lanczos<Scalar>(static_cast<Eigen::Index>(op.dim()), apply, lo);
  if (!r.converged)
    throw std::runtime_error("ed: eigensolver did not converge; best residual " +
                             std::to_string(r.residuals.maxCoeff()));
  SpectrumResult s;
  s.values = r.values;
  s.vectors = r.vectors.template cast<Complex>();
  s.residuals = r.residuals;
  s.iterations = r.iterations;
  s.seed = r.seed;
  return s;
}

}  // namespace detail

// Lowest eigenpairs of a SpinModel. Dense full diagonalization for N <= 8
// (or on request); seeded block Krylov iteration above. Two extra pairs are
// computed internally so quasi-degenerate clusters at the window edge are
// resolved.
inline SpectrumResult lowest_eigenpairs(const SpinModel& m,
                                        const EdOptions& opt = {}) {
  if (m.sites > opt.site_cap)
    throw std::invalid_argument("ed: site count exceeds cap");
  const SpinOperator op = compile_spin_model(m);
  const Eigen::Index dim = static_cast<Eigen::Index>(op.dim());
  if (opt.k < 1 || opt.k > dim)
    throw std::invalid_argument("ed: k out of range");
  const int want = static_cast<int>(std::min<Eigen::Index>(opt.k + 2, dim));

  SpectrumResult s;
  const bool dense = opt.method == EdMethod::Dense ||
                     (opt.method == EdMethod::Auto && m.sites <= 8);
  if (dense) {
    if (m.sites > 10)
      throw std::invalid_argument("ed: dense method needs N <= 10");
    s.dense = true;
    s.seed = opt.seed;
    const MatrixXcd H = op.dense();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    s.values = es.eigenvalues().head(want);
    s.vectors = es.eigenvectors().leftCols(want);
    s.residuals.resize(want);
    for (int i = 0; i < want; ++i)
      s.residuals[i] =
          (H * s.vectors.col(i) - s.values[i] * s.vectors.col(i)).norm();
  } else {
    if (op.real_in_z_basis)
      s = detail::solve_iterative<double>(op, opt, want);
    else
      s = detail::solve_iterative<Complex>(op, opt, want);
  }
  s.clusters = detail::degeneracy_clusters(s.values, opt.degeneracy_tol);
  s.values.conservativeResize(std::min<Eigen::Index>(opt.k, s.values.size()));
  s.vectors.conservativeResize(Eigen::NoChange, s.values.size());
  s.residuals.conservativeResize(s.values.size());
  if (s.values.size() >= 2) s.gap = s.values[1] - s.values[0];
  return s;
}

// <v| sigma_a_i sigma_a_j |v>; the connected flag subtracts the single-site
// expectations.
inline double expectation_site(const VectorXcd& v, int sites, int axis,
                               int j) {
  if (j < 0 || j >= sites) throw std::invalid_argument("expectation: bad site");
  const PauliString s = single_site_string(axis, j);
  const std::uint64_t fl = s.flips();
  Complex acc(0, 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << sites); ++m)
    acc += std::conj(v[static_cast<Eigen::Index>(m ^ fl)]) *
           string_amplitude(s, m) * v[static_cast<Eigen::Index>(m)];
  return acc.real();
}

inline double correlator(const VectorXcd& v, int sites, int axis, int i, int j,
                         bool connected = false) {
  if (i == j) throw std::invalid_argument("correlator: need distinct sites");
  if (axis < 0 || axis > 2) throw std::invalid_argument("correlator: bad axis");
  const PauliString s = two_site_string(axis, i, axis, j);
  const std::uint64_t fl = s.flips();
  Complex acc(0, 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << sites); ++m)
    acc += std::conj(v[static_cast<Eigen::Index>(m ^ fl)]) *
           string_amplitude(s, m) * v[static_cast<Eigen::Index>(m)];
  double out = acc.real();
  if (connected)
    out -= expectation_site(v, sites, axis, i) *
           expectation_site(v, sites, axis, j);
  return out;
}

}  // namespace ringmag
