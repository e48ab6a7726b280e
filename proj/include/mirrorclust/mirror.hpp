#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mirrorclust/netmodel.hpp"

namespace mirrorclust {

/// Symmetric, nonnegative, zero-diagonal matrix of pairwise distances, either
/// between time points of one network or between networks.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Validates symmetry (1e-12), zero diagonal and nonnegativity; stores the
  /// symmetrized matrix. Throws ShapeError or DomainError.
  explicit DistanceMatrix(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Eigen::Index size() const noexcept { return matrix_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  Eigen::MatrixXd matrix_;
};

/// T x r CMDS configuration. Identified up to an r x r orthogonal transform.
struct Mirror {
  Eigen::MatrixXd matrix;
  /// Retained eigenvalues of the doubly centered matrix, descending, all > 0.
  Eigen::VectorXd eigenvalues;
  /// Largest discarded eigenvalue, for checking the spectral gap.
  double spectrum_tail = 0.0;

  Eigen::Index time_points() const noexcept { return matrix.rows(); }
  Eigen::Index dim() const noexcept { return matrix.cols(); }
};

/// Entry (t1, t2) is procrustes_cost(X_t1, X_t2) / sqrt(n).
DistanceMatrix latent_distance_matrix(const std::vector<LatentPositions>& xs,
                                      unsigned threads = 1);

/// B = -1/2 J (D o D) J with J the centering matrix.
Eigen::MatrixXd double_center(const DistanceMatrix& d);

/// Classical MDS to r dimensions: M = U Lambda^{1/2} from the top r algebraic
/// eigenpairs of double_center(d). Throws DegenerateSpectrumError, carrying the
/// full spectrum, when the r-th eigenvalue is not positive.
Mirror cmds(const DistanceMatrix& d, Eigen::Index r);

/// ASE of every snapshot at dimension d, then cmds of the latent distances.
Mirror estimate_mirror(const DynamicNetwork& net, Eigen::Index d, Eigen::Index r,
                       unsigned threads = 1);

}  // namespace mirrorclust
