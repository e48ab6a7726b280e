#include "mirrorclust/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mirrorclust/errors.hpp"
#include "mirrorclust/numkernel.hpp"

namespace mirrorclust {

std::vector<Eigen::Index> magnitude_order(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::abs(values[i]) > std::abs(values[j]);
  });
  // +lambda and -lambda rarely come out bit-identical in magnitude, so
  // magnitudes within a few ulps of the spectral norm count as ties.
  const double scale = values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  const double tie = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           std::abs(values[order[begin]]) - std::abs(values[order[end]]) <= tie) {
      ++end;
    }
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
              order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](Eigen::Index i, Eigen::Index j) {
                if (values[i] != values[j]) return values[i] > values[j];
                return i < j;
              });
    begin = end;
  }
  return order;
}

LatentPositions ase(const Eigen::MatrixXd& a, Eigen::Index d) {
  if (d < 1 || d > a.rows()) {
    std::ostringstream os;
    os << "ase: embedding dimension " << d << " must lie in [1, " << a.rows() << "]";
    throw DomainError(os.str());
  }
  const PartialSymEig spectrum(a);
  std::vector<Eigen::Index> order = magnitude_order(spectrum.values());
  order.resize(static_cast<std::size_t>(d));
  const SymEig top = spectrum.select(order);
  Eigen::MatrixXd x = top.vectors * top.values.cwiseAbs().cwiseSqrt().asDiagonal();
  return LatentPositions(std::move(x));
}

LatentPositions ase(const AdjacencySnapshot& a, Eigen::Index d) { return ase(a.matrix(), d); }

Eigen::VectorXd magnitude_spectrum(const Eigen::MatrixXd& a) {
  const PartialSymEig spectrum(a);
  Eigen::VectorXd mags = spectrum.values().cwiseAbs();
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

Eigen::Index select_dim_elbow(const Eigen::VectorXd& eigenvalues, Eigen::Index max_rank) {
  const Eigen::Index p = eigenvalues.size();
  if (p < 2) throw DomainError("select_dim_elbow: need at least 2 eigenvalues");
  if (max_rank < 1 || max_rank > p) {
    std::ostringstream os;
    os << "select_dim_elbow: max_rank " << max_rank << " must lie in [1, " << p << "]";
    throw DomainError(os.str());
  }
  Eigen::VectorXd x = eigenvalues.cwiseAbs();
  std::sort(x.begin(), x.end(), std::greater<>());

  const auto scatter = [&](Eigen::Index begin, Eigen::Index count) {
    if (count == 0) return 0.0;
    const auto seg = x.segment(begin, count);
    return (seg.array() - seg.mean()).square().sum();
  };

  // With the MLE variance plugged in, the profile log-likelihood is
  // -p/2 * (log(2 pi SS/p) + 1), monotone decreasing in the pooled scatter SS.
  Eigen::Index best_q = 1;
  double best_ss = std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 1; q <= max_rank; ++q) {
    const double ss = scatter(0, q) + scatter(q, p - q);
    if (ss < best_ss) {
      best_ss = ss;
      best_q = q;
    }
  }
  return best_q;
}

}  // namespace mirrorclust
