#pragma once

// Extreme eigenpairs of symmetric matrices: a dense path built on
// Eigen::SelfAdjointEigenSolver and a Lanczos path with full
// reorthogonalization and locking (converged vectors are deflated from the
// Krylov space before the next pair is sought).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "netdet/error.hpp"

namespace netdet {

template <typename Scalar = double>
struct EigenPair {
  Scalar value{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
};

enum class Spectrum { smallest, largest };

enum class EigenMethod {
  automatic,  ///< dense for n <= dense_limit, Lanczos otherwise
  dense,
  lanczos,
};

struct EigenOptions {
  double tol = 1e-8;  ///< residual bound relative to a norm bound of the matrix
  EigenMethod method = EigenMethod::automatic;
  Eigen::Index dense_limit = 512;
  Eigen::Index max_krylov = 0;  ///< cap on Krylov dimension per pair; 0 means n
  std::uint64_t seed = 0x5eedULL;
};

/// Flip `v` so that its first maximum-magnitude entry is positive.
template <typename Derived>
void canonical_sign(Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return;
  const auto peak = v.cwiseAbs().maxCoeff();
  const auto slack = peak * 1e-10;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - slack) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

/// Upper bound on the spectral norm: the largest absolute row sum.
template <typename MatrixType>
typename MatrixType::Scalar norm_bound(const MatrixType& m) {
  using Scalar = typename MatrixType::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rows = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m.rows());
  if constexpr (std::is_base_of_v<Eigen::SparseMatrixBase<MatrixType>, MatrixType>) {
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
      for (typename MatrixType::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
    }
  } else {
    rows = m.cwiseAbs().rowwise().sum();
  }
  return m.rows() == 0 ? Scalar(0) : rows.maxCoeff();
}

namespace detail {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
void orthogonalize(Vec<Scalar>& w, const Mat<Scalar>& basis, Eigen::Index cols) {
  // Two passes of classical Gram-Schmidt keep the basis orthogonal to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) return;
    w.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * w);
  }
}

}  // namespace detail

/// Lanczos with locking for the k extreme eigenpairs of the symmetric
/// operator `apply(x, y)` (y = M x) of dimension n. `norm` bounds ||M||.
/// Results come back in the order they were locked: ascending for smallest,
/// descending for largest.
template <typename Scalar, typename Apply>
std::vector<EigenPair<Scalar>> lanczos_extreme(Apply&& apply, Eigen::Index n, Eigen::Index k,
                                               Spectrum which, Scalar norm,
                                               const EigenOptions& opt = {}) {
  using Vec = detail::Vec<Scalar>;
  using Mat = detail::Mat<Scalar>;

  const Scalar target = static_cast<Scalar>(opt.tol) * std::max(norm, Scalar(1e-300));
  const Scalar breakdown = std::numeric_limits<Scalar>::epsilon() * std::max(norm, Scalar(1)) * 16;

  Mat locked(n, k);
  std::vector<EigenPair<Scalar>> pairs;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto random_direction = [&](const Mat& basis, Eigen::Index basis_cols) -> Vec {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vec q(n);
      for (Eigen::Index i = 0; i < n; ++i) q(i) = static_cast<Scalar>(gauss(rng));
      detail::orthogonalize<Scalar>(q, locked, static_cast<Eigen::Index>(pairs.size()));
      detail::orthogonalize<Scalar>(q, basis, basis_cols);
      const Scalar len = q.norm();
      if (len > Scalar(1e-8)) return q / len;
    }
    return Vec();
  };

  auto projected_apply = [&](const Vec& x, Vec& y) {
    apply(x, y);
    detail::orthogonalize<Scalar>(y, locked, static_cast<Eigen::Index>(pairs.size()));
  };

  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index room = n - j;
    const Eigen::Index cap = opt.max_krylov > 0 ? std::min(opt.max_krylov, room) : room;

    Mat basis(n, cap);
    Vec alpha(cap), beta(cap);
    Vec q = random_direction(basis, 0);
    if (q.size() == 0) throw SolverError("Lanczos could not find a start vector", 0.0);
    basis.col(0) = q;

    Scalar best_residual = std::numeric_limits<Scalar>::infinity();
    Vec w(n), ritz(n), mv(n);
    Scalar theta{};
    bool converged = false;

    for (Eigen::Index m = 0; m < cap; ++m) {
      projected_apply(basis.col(m), w);
      alpha(m) = basis.col(m).dot(w);
      // Late in the run w is mostly rounding noise; dividing by a tiny beta
      // would amplify any locked component left in it, so clean both sets.
      for (int pass = 0; pass < 2; ++pass) {
        detail::orthogonalize<Scalar>(w, basis, m + 1);
        detail::orthogonalize<Scalar>(w, locked, static_cast<Eigen::Index>(pairs.size()));
      }
      beta(m) = w.norm();

      const bool last = (m + 1 == cap);
      const bool check = last || beta(m) <= breakdown || m < 8 || (m % 4 == 3);
      if (check) {
        Mat t = Mat::Zero(m + 1, m + 1);
        for (Eigen::Index i = 0; i <= m; ++i) {
          t(i, i) = alpha(i);
          if (i < m) t(i, i + 1) = t(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Mat> tri(t);
        const Eigen::Index pick = which == Spectrum::smallest ? 0 : m;
        theta = tri.eigenvalues()(pick);
        const Scalar estimate = std::abs(beta(m) * tri.eigenvectors()(m, pick));
        if (estimate <= target || last || beta(m) <= breakdown) {
          ritz.noalias() = basis.leftCols(m + 1) * tri.eigenvectors().col(pick);
          ritz.normalize();
          projected_apply(ritz, mv);
          const Scalar residual = (mv - theta * ritz).norm();
          best_residual = std::min(best_residual, residual);
          if (residual <= target) {
            converged = true;
            break;
          }
        }
      }
      if (last) break;
      if (beta(m) <= breakdown) {
        // Invariant subspace: continue from a fresh direction.
        Vec fresh = random_direction(basis, m + 1);
        if (fresh.size() == 0) break;
        beta(m) = 0;
        basis.col(m + 1) = fresh;
      } else {
        basis.col(m + 1) = w / beta(m);
      }
    }

    if (!converged) {
      throw SolverError("Lanczos did not converge for eigenpair " + std::to_string(j) +
                            " (best residual " + std::to_string(best_residual) + ")",
                        static_cast<double>(best_residual));
    }
    // Re-orthogonalize against locked vectors to keep the output basis clean.
    detail::orthogonalize<Scalar>(ritz, locked, static_cast<Eigen::Index>(pairs.size()));
    ritz.normalize();
    locked.col(j) = ritz;
    pairs.push_back({theta, ritz});
  }
  return pairs;
}

/// k extreme eigenpairs of a symmetric dense or sparse matrix, each vector
/// of unit norm with canonical sign. Smallest come back ascending, largest
/// descending.
template <typename MatrixType>
std::vector<EigenPair<typename MatrixType::Scalar>> extreme_eigenpairs(const MatrixType& m,
                                                                      Eigen::Index k,
                                                                      Spectrum which,
                                                                      const EigenOptions& opt = {}) {
  using Scalar = typename MatrixType::Scalar;
  using Mat = detail::Mat<Scalar>;
  using Vec = detail::Vec<Scalar>;
  constexpr bool is_sparse = std::is_base_of_v<Eigen::SparseMatrixBase<MatrixType>, MatrixType>;

  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw ValidationError("eigensolver requires a square matrix");
  if (k < 0 || k > n) throw ValidationError("requested eigenpair count exceeds matrix order");
  if (!(opt.tol > 0.0)) throw ValidationError("eigensolver tolerance must be positive");

  const Scalar bound = norm_bound(m);
  {
    Scalar asym{};
    if constexpr (is_sparse) {
      Eigen::SparseMatrix<Scalar> diff = Eigen::SparseMatrix<Scalar>(m) - Eigen::SparseMatrix<Scalar>(m.transpose());
      asym = diff.coeffs().size() ? diff.coeffs().cwiseAbs().maxCoeff() : Scalar(0);
    } else {
      asym = n ? (m - m.transpose()).cwiseAbs().maxCoeff() : Scalar(0);
    }
    if (asym > Scalar(1e-12) * std::max(bound, Scalar(1))) {
      throw ValidationError("eigensolver requires a symmetric matrix");
    }
  }

  std::vector<EigenPair<Scalar>> pairs;
  const bool dense = opt.method == EigenMethod::dense ||
                     (opt.method == EigenMethod::automatic && n <= opt.dense_limit);
  if (dense) {
    Mat full;
    if constexpr (is_sparse) {
      full = Mat(m);
    } else {
      full = m;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(full);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed", 0.0);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index idx = which == Spectrum::smallest ? j : n - 1 - j;
      pairs.push_back({es.eigenvalues()(idx), es.eigenvectors().col(idx)});
    }
  } else {
    auto apply = [&](const Vec& x, Vec& y) { y.noalias() = m * x; };
    pairs = lanczos_extreme<Scalar>(apply, n, k, which, bound, opt);
    std::stable_sort(pairs.begin(), pairs.end(), [which](const auto& a, const auto& b) {
      return which == Spectrum::smallest ? a.value < b.value : a.value > b.value;
    });
  }
  for (auto& p : pairs) canonical_sign(p.vector);
  return pairs;
}

template <typename MatrixType>
auto smallest_eigenpairs(const MatrixType& m, Eigen::Index k, const EigenOptions& opt = {}) {
  return extreme_eigenpairs(m, k, Spectrum::smallest, opt);
}

template <typename MatrixType>
auto largest_eigenpairs(const MatrixType& m, Eigen::Index k, const EigenOptions& opt = {}) {
  return extreme_eigenpairs(m, k, Spectrum::largest, opt);
}

}  // namespace netdet
