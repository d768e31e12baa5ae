#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "ringmag/types.hpp"

namespace ringmag {

struct LanczosOptions {
  int k = 4;               // eigenpairs wanted
  int k_strict = 0;        // pairs held to the gates below; 0 = all k.
                           // Trailing pairs ride along at whatever accuracy
                           // the basis reached (window-edge bookkeeping);
                           // gating them too can exhaust the basis when the
                           // window edge sits inside a degenerate cluster.
  int block = 4;           // block width; captures quasi-degenerate doublets
  int max_basis = 360;     // hard cap on Krylov basis columns
  double tol = 1e-13;      // Ritz-value stabilization, relative to scale
  double residual_tol = 1e-10;  // final residual gate, relative to scale
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

template <class Scalar>
struct LanczosResult {
  VectorXd values;
  Matrix<Scalar> vectors;
  VectorXd residuals;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

namespace detail {

template <class Scalar>
void fill_random(Eigen::Ref<Matrix<Scalar>> M, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if constexpr (std::is_same_v<Scalar, Complex>)
        M(i, j) = Complex(gauss(rng), gauss(rng));
      else
        M(i, j) = gauss(rng);
    }
}

// Orthogonalizes the columns of W against the first `cols` columns of Q and
// against each other (two classical passes per column); rank-deficient
// columns are replaced by fresh random directions.
template <class Scalar>
void orthonormalize_block(Matrix<Scalar>& Q, Eigen::Index cols,
                          Matrix<Scalar>& W, std::mt19937_64& rng) {
  for (Eigen::Index i = 0; i < W.cols(); ++i) {
    double norm_in = W.col(i).norm();
    if (norm_in == 0.0) norm_in = 1.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        if (cols > 0)
          W.col(i) -= Q.leftCols(cols) * (Q.leftCols(cols).adjoint() * W.col(i));
        for (Eigen::Index p = 0; p < i; ++p)
          W.col(i) -= W.col(p) * (W.col(p).adjoint() * W.col(i));
      }
      const double norm_out = W.col(i).norm();
      if (norm_out > 1e-10 * norm_in) {
        W.col(i) /= norm_out;
        break;
      }
      // invariant subspace hit; restart this column on a random direction
      fill_random<Scalar>(W.col(i), rng);
      norm_in = W.col(i).norm();
    }
  }
}

}  // namespace detail

// Block Lanczos with full reorthogonalization for the lowest eigenpairs of a
// Hermitian operator, supplied as its action on column blocks:
// apply(in, out) with out pre-sized to in's shape. The projected operator is
// accumulated densely (basis stays small), Ritz values are monitored for
// stabilization and the returned pairs carry explicitly recomputed residuals.
template <class Scalar, class MatVec>
LanczosResult<Scalar> block_lanczos(Eigen::Index dim, MatVec&& apply,
                                    const LanczosOptions& opt) {
  using Mat = Matrix<Scalar>;
  if (opt.k < 1 || opt.k > dim)
    throw std::invalid_argument("lanczos: k out of range");
  const Eigen::Index b = std::min<Eigen::Index>(opt.block, dim);
  const Eigen::Index cap =
      std::min<Eigen::Index>(std::max<Eigen::Index>(opt.max_basis, 2 * b), dim);

  std::mt19937_64 rng(opt.seed);
  Mat Q(dim, cap);
  Mat T = Mat::Zero(cap, cap);

  Mat block(dim, b);
  detail::fill_random<Scalar>(block, rng);
  detail::orthonormalize_block(Q, 0, block, rng);
  Q.leftCols(b) = block;

  Eigen::Index applied = 0;  // columns whose image is already projected into T
  Eigen::Index cols = b;     // columns present in Q
  VectorXd prev;
  LanczosResult<Scalar> res;
  res.seed = opt.seed;

  Mat W(dim, b), X, AX;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  while (true) {
    const Eigen::Index nb = cols - applied;
    W.resize(dim, nb);
    apply(Q.middleCols(applied, nb).eval(), W);
    const Mat P = Q.leftCols(cols).adjoint() * W;
    T.block(0, applied, cols, nb) = P;
    T.block(applied, 0, nb, cols) = P.adjoint();
    applied = cols;
    ++res.iterations;

    es.compute(T.topLeftCorner(applied, applied));
    const Eigen::Index avail = std::min<Eigen::Index>(opt.k, applied);
    const Eigen::Index gate =
        opt.k_strict > 0 ? std::min<Eigen::Index>(opt.k_strict, avail) : avail;
    VectorXd ritz = es.eigenvalues().head(avail).real();
    const double scale =
        std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());

    bool stable = applied >= std::min<Eigen::Index>(dim, opt.k + 2) &&
                  prev.size() == ritz.size();
    if (stable)
      for (Eigen::Index i = 0; i < gate; ++i)
        if (std::abs(ritz[i] - prev[i]) > opt.tol * scale) stable = false;
    prev = ritz;

    const bool exhausted = applied + b > cap || applied == dim;
    if (stable || exhausted) {
      X = Q.leftCols(applied) * es.eigenvectors().leftCols(avail);
      AX.resize(dim, avail);
      apply(X, AX);
      res.values = ritz;
      res.vectors = X;
      res.residuals.resize(avail);
      bool ok = avail == opt.k;
      for (Eigen::Index i = 0; i < avail; ++i) {
        res.residuals[i] = (AX.col(i) - ritz[i] * X.col(i)).norm();
        if (i < gate && res.residuals[i] > opt.residual_tol * scale) ok = false;
      }
      res.converged = ok;
      if (ok || exhausted) return res;
    }

    // W still holds A * (latest block); orthogonalized it is the next block
    detail::orthonormalize_block(Q, applied, W, rng);
    Q.middleCols(cols, b) = W;
    cols += b;
  }
}

}  // namespace ringmag
