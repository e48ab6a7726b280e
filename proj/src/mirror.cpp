#include "mirrorclust/mirror.hpp"

#include <cmath>
#include <sstream>

#include "mirrorclust/embed.hpp"
#include "mirrorclust/errors.hpp"
#include "mirrorclust/numkernel.hpp"
#include "mirrorclust/parallel.hpp"

namespace mirrorclust {

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw ShapeError("distance matrix must be square");
  if (!matrix_.allFinite()) throw DomainError("distance matrix has non-finite entries");
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    if (matrix_(i, i) != 0.0) throw DomainError("distance matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j) {
      if (std::abs(matrix_(i, j) - matrix_(j, i)) > 1e-12) {
        throw ShapeError("distance matrix is not symmetric");
      }
      if (matrix_(i, j) < 0.0 || matrix_(j, i) < 0.0) {
        throw DomainError("distance matrix has negative entries");
      }
      matrix_(j, i) = matrix_(i, j);
    }
  }
}

DistanceMatrix latent_distance_matrix(const std::vector<LatentPositions>& xs, unsigned threads) {
  const auto t = static_cast<Eigen::Index>(xs.size());
  for (const auto& x : xs) {
    if (x.n() != xs.front().n() || x.d() != xs.front().d()) {
      throw ShapeError("latent_distance_matrix: latent positions differ in shape");
    }
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(t, t);
  if (t == 0) return DistanceMatrix(d);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(xs.front().n()));
  // Row t1 holds pairs (t1, t2 > t1); rows are independent tasks.
  parallel_for(static_cast<std::size_t>(t), threads, [&](std::size_t row) {
    const auto t1 = static_cast<Eigen::Index>(row);
    for (Eigen::Index t2 = t1 + 1; t2 < t; ++t2) {
      d(t1, t2) = procrustes_cost(xs[row].matrix(), xs[t2].matrix()) * inv_sqrt_n;
    }
  });
  d.triangularView<Eigen::StrictlyLower>() = d.transpose();
  return DistanceMatrix(std::move(d));
}

Eigen::MatrixXd double_center(const DistanceMatrix& d) {
  const Eigen::MatrixXd sq = d.matrix().array().square().matrix();
  const Eigen::VectorXd row_means = sq.rowwise().mean();
  const Eigen::RowVectorXd col_means = sq.colwise().mean();
  const double grand = sq.size() == 0 ? 0.0 : sq.mean();
  Eigen::MatrixXd b = sq;
  b.colwise() -= row_means;
  b.rowwise() -= col_means;
  b.array() += grand;
  b *= -0.5;
  return 0.5 * (b + b.transpose());
}

Mirror cmds(const DistanceMatrix& d, Eigen::Index r) {
  const Eigen::Index t = d.size();
  if (r < 1 || r >= t) {
    std::ostringstream os;
    os << "cmds: dimension r = " << r << " must satisfy 1 <= r < T = " << t;
    throw DomainError(os.str());
  }
  const SymEig eig = sym_eig(double_center(d));
  const double scale = eig.values.cwiseAbs().maxCoeff();
  // Eigenvalues at roundoff level are zero in exact arithmetic.
  const double floor = 1e-12 * scale;
  if (!(eig.values[r - 1] > floor)) {
    std::ostringstream os;
    os << "cmds: eigenvalue " << r << " of the doubly centered matrix is "
       << eig.values[r - 1] << " (not positive); spectrum:";
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) os << ' ' << eig.values[i];
    throw DegenerateSpectrumError(
        os.str(), std::vector<double>(eig.values.data(), eig.values.data() + eig.values.size()));
  }
  Mirror m;
  m.eigenvalues = eig.values.head(r);
  m.matrix = eig.vectors.leftCols(r) * m.eigenvalues.cwiseSqrt().asDiagonal();
  m.spectrum_tail = eig.values[r];
  return m;
}

Mirror estimate_mirror(const DynamicNetwork& net, Eigen::Index d, Eigen::Index r,
                       unsigned threads) {
  std::vector<LatentPositions> xs(net.snapshots.size());
  parallel_for(xs.size(), threads, [&](std::size_t t) { xs[t] = ase(net.snapshots[t], d); });
  return cmds(latent_distance_matrix(xs, threads), r);
}

}  // namespace mirrorclust
