#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mirrorclust/netmodel.hpp"

namespace mirrorclust {

enum class DimRule { fixed, elbow };

/// How each snapshot's embedding dimension is chosen. With `elbow`, `d` is
/// ignored and the profile-likelihood elbow over the top `max_rank`
/// eigenvalue magnitudes decides.
struct EmbeddingConfig {
  Eigen::Index d = 1;
  DimRule dim_rule = DimRule::fixed;
  Eigen::Index max_rank = 10;
};

/// Adjacency spectral embedding U |Lambda|^{1/2} from the d eigenpairs of
/// largest magnitude. Magnitude ties go to the algebraically larger value,
/// then to the lower position in descending algebraic order.
LatentPositions ase(const AdjacencySnapshot& a, Eigen::Index d);

/// Same as ase() for an arbitrary symmetric matrix, e.g. a probability matrix.
LatentPositions ase(const Eigen::MatrixXd& a, Eigen::Index d);

/// Positions into a descending-algebraic spectrum, ordered by the ASE
/// selection rule (magnitude, then algebraic value, then position).
std::vector<Eigen::Index> magnitude_order(const Eigen::VectorXd& descending_values);

/// Eigenvalue magnitudes of `a` sorted descending.
Eigen::VectorXd magnitude_spectrum(const Eigen::MatrixXd& a);

/// Elbow of a scree plot: the split q in [1, max_rank] maximizing the
/// profile log-likelihood of a two-segment Gaussian model with a pooled
/// variance. Values are taken by magnitude and sorted descending first.
/// A segment with zero spread has unbounded likelihood; ties go to the
/// smallest q.
Eigen::Index select_dim_elbow(const Eigen::VectorXd& eigenvalues, Eigen::Index max_rank);

}  // namespace mirrorclust
