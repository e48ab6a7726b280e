#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mirrorclust {

/// n x d matrix whose rows are vertex positions, true or estimated.
class LatentPositions {
 public:
  LatentPositions() = default;
  explicit LatentPositions(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {}

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Eigen::Index n() const noexcept { return matrix_.rows(); }
  Eigen::Index d() const noexcept { return matrix_.cols(); }

 private:
  Eigen::MatrixXd matrix_;
};

/// Symmetric 0/1 adjacency matrix with an empty diagonal.
class AdjacencySnapshot {
 public:
  AdjacencySnapshot() = default;
  /// Throws DomainError unless `matrix` is square, symmetric, hollow and 0/1.
  explicit AdjacencySnapshot(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Eigen::Index n() const noexcept { return matrix_.rows(); }
  Eigen::Index edge_count() const;

 private:
  Eigen::MatrixXd matrix_;
};

/// One network observed at T time points over a common vertex set.
struct DynamicNetwork {
  std::string id;
  std::vector<AdjacencySnapshot> snapshots;

  Eigen::Index n() const { return snapshots.empty() ? 0 : snapshots.front().n(); }
  std::size_t time_points() const noexcept { return snapshots.size(); }
};

/// P = X X^T. Entries within 1e-12 of [0, 1] are clamped; anything further
/// out raises DomainError naming the offending vertex pair.
Eigen::MatrixXd probability_matrix(const LatentPositions& x);

/// One RDPG draw: independent Bernoulli(P_ij) for i < j, mirrored.
AdjacencySnapshot rdpg_sample(const LatentPositions& x, std::uint64_t seed);

/// Samples each time point independently. The seed for time t is
/// derive_seed(seed, id, t), so output does not depend on evaluation order.
DynamicNetwork sample_dynamic_network(const std::vector<LatentPositions>& xs, std::uint64_t seed,
                                      const std::string& id = "");

}  // namespace mirrorclust
