#pragma once

#include <span>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace mirrorclust {

/// Eigendecomposition of a real symmetric matrix. `values` are sorted by
/// descending algebraic value and column j of `vectors` pairs with values[j].
/// Each column is signed so that its largest-magnitude entry is positive.
struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Thin singular value decomposition M = u * diag(s) * v^T, s descending.
struct Svd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

SymEig sym_eig(const Eigen::MatrixXd& a);

Svd svd(const Eigen::MatrixXd& m);

/// Orthogonal O minimizing ||x1 * O - x2||_F.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2);

/// min over orthogonal O of ||x1 * O - x2||_F.
double procrustes_cost(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2);

/// Flips columns in place so each column's largest-magnitude entry is
/// positive (first such entry on ties).
void canonicalize_column_signs(Eigen::MatrixXd& vectors);

/// Spectrum of a symmetric matrix with eigenvectors computed on demand.
///
/// Construction tridiagonalizes the matrix and finds all eigenvalues. select()
/// then recovers only the requested eigenvectors by inverse iteration on the
/// tridiagonal form, which is several times cheaper than a full decomposition
/// when few vectors are needed. Clustered selections, or any vector whose
/// residual check fails, fall back to the full decomposition.
class PartialSymEig {
 public:
  explicit PartialSymEig(const Eigen::MatrixXd& a);

  /// All eigenvalues, descending algebraic order.
  const Eigen::VectorXd& values() const noexcept { return values_; }

  /// Eigenpairs for positions `which` into values(). Columns follow the order
  /// of `which` and use the same sign convention as sym_eig.
  SymEig select(std::span<const Eigen::Index> which) const;

 private:
  Eigen::VectorXd tridiagonal_vector(double lambda) const;

  Eigen::MatrixXd a_;
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd subdiag_;
  Eigen::VectorXd values_;
  double scale_ = 0.0;
};

}  // namespace mirrorclust
