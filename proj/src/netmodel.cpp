#include "mirrorclust/netmodel.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "mirrorclust/errors.hpp"
#include "mirrorclust/seeding.hpp"

namespace mirrorclust {

namespace {
constexpr double kProbabilitySlack = 1e-12;
}

AdjacencySnapshot::AdjacencySnapshot(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw DomainError("adjacency matrix must be square");
  }
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    if (matrix_(i, i) != 0.0) throw DomainError("adjacency matrix has a self-loop");
    for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j) {
      const double v = matrix_(i, j);
      if (v != matrix_(j, i)) throw DomainError("adjacency matrix is not symmetric");
      if (v != 0.0 && v != 1.0) throw DomainError("adjacency matrix entries must be 0 or 1");
    }
  }
}

Eigen::Index AdjacencySnapshot::edge_count() const {
  return static_cast<Eigen::Index>(matrix_.sum() / 2.0);
}

Eigen::MatrixXd probability_matrix(const LatentPositions& x) {
  Eigen::MatrixXd p = x.matrix() * x.matrix().transpose();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      double& v = p(i, j);
      if (!(v >= -kProbabilitySlack && v <= 1.0 + kProbabilitySlack)) {
        std::ostringstream os;
        os << "probability_matrix: inner product of vertices " << std::min(i, j) << " and "
           << std::max(i, j) << " is "
           << v << ", outside [0, 1]";
        throw DomainError(os.str());
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  return p;
}

AdjacencySnapshot rdpg_sample(const LatentPositions& x, std::uint64_t seed) {
  const Eigen::MatrixXd p = probability_matrix(x);
  const Eigen::Index n = p.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::mt19937_64 rng(seed);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (uniform01(rng) < p(i, j)) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return AdjacencySnapshot(std::move(a));
}

DynamicNetwork sample_dynamic_network(const std::vector<LatentPositions>& xs, std::uint64_t seed,
                                      const std::string& id) {
  DynamicNetwork net{id, {}};
  net.snapshots.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (xs[t].n() != xs.front().n()) {
      std::ostringstream os;
      os << "sample_dynamic_network: time point " << t << " has " << xs[t].n()
         << " vertices, expected " << xs.front().n();
      throw ShapeError(os.str());
    }
    net.snapshots.push_back(rdpg_sample(xs[t], derive_seed(seed, id, t)));
  }
  return net;
}

}  // namespace mirrorclust
