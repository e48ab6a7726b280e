#include "mirrorclust/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "mirrorclust/errors.hpp"
#include "mirrorclust/numkernel.hpp"
#include "mirrorclust/parallel.hpp"

namespace mirrorclust {

Linkage parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::single;
  if (name == "complete") return Linkage::complete;
  if (name == "average") return Linkage::average;
  throw DomainError("unknown linkage '" + std::string(name) +
                    "' (expected single, complete or average)");
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::single:
      return "single";
    case Linkage::complete:
      return "complete";
    case Linkage::average:
      return "average";
  }
  return "unknown";
}

Labeling::Labeling(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) return;
  const int k = *std::max_element(labels_.begin(), labels_.end());
  std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)) + 1, false);
  for (const int l : labels_) {
    if (l < 1) throw DomainError("cluster labels must be >= 1");
    seen[static_cast<std::size_t>(l)] = true;
  }
  for (int l = 1; l <= k; ++l) {
    if (!seen[static_cast<std::size_t>(l)]) {
      throw DomainError("cluster label " + std::to_string(l) + " is unused (labels must be 1..K)");
    }
  }
  clusters_ = k;
}

DistanceMatrix mirror_distance_matrix(const std::vector<Mirror>& mirrors, unsigned threads) {
  const auto m = static_cast<Eigen::Index>(mirrors.size());
  for (const auto& mm : mirrors) {
    if (mm.time_points() != mirrors.front().time_points() ||
        mm.dim() != mirrors.front().dim()) {
      std::ostringstream os;
      os << "mirror_distance_matrix: mirrors must share T and r (got " << mm.time_points() << "x"
         << mm.dim() << " vs " << mirrors.front().time_points() << "x" << mirrors.front().dim()
         << ")";
      throw ShapeError(os.str());
    }
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  if (m == 0) return DistanceMatrix(d);
  const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(mirrors.front().time_points()));
  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      d(i, j) = procrustes_cost(mirrors[row].matrix, mirrors[j].matrix) * inv_sqrt_t;
    }
  });
  d.triangularView<Eigen::StrictlyLower>() = d.transpose();
  return DistanceMatrix(std::move(d));
}

Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage) {
  const auto m = static_cast<int>(d.size());
  if (m < 2) throw DomainError("agglomerate: need at least 2 items to cluster");

  // Slot s holds the active cluster whose node id is ids[s].
  Eigen::MatrixXd dist = d.matrix();
  std::vector<int> ids(static_cast<std::size_t>(m));
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<int> sizes(static_cast<std::size_t>(m), 1);
  std::vector<bool> active(static_cast<std::size_t>(m), true);

  Dendrogram out;
  out.leaves = m;
  out.merges.reserve(static_cast<std::size_t>(m - 1));
  for (int step = 0; step < m - 1; ++step) {
    int best_s = -1;
    int best_t = -1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_key{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
    for (int s = 0; s < m; ++s) {
      if (!active[static_cast<std::size_t>(s)]) continue;
      for (int t = s + 1; t < m; ++t) {
        if (!active[static_cast<std::size_t>(t)]) continue;
        const double v = dist(s, t);
        const int ia = ids[static_cast<std::size_t>(s)];
        const int ib = ids[static_cast<std::size_t>(t)];
        const std::pair<int, int> key{std::min(ia, ib), std::max(ia, ib)};
        if (v < best || (v == best && key < best_key)) {
          best = v;
          best_key = key;
          best_s = s;
          best_t = t;
        }
      }
    }

    const int new_id = m + step;
    out.merges.push_back({best_key.first, best_key.second, best, new_id});

    // Merged cluster lives in slot best_s.
    const double ns = sizes[static_cast<std::size_t>(best_s)];
    const double nt = sizes[static_cast<std::size_t>(best_t)];
    for (int k = 0; k < m; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == best_s || k == best_t) continue;
      const double ds = dist(best_s, k);
      const double dt = dist(best_t, k);
      double v = 0.0;
      switch (linkage) {
        case Linkage::single:
          v = std::min(ds, dt);
          break;
        case Linkage::complete:
          v = std::max(ds, dt);
          break;
        case Linkage::average:
          v = (ns * ds + nt * dt) / (ns + nt);
          break;
      }
      dist(best_s, k) = v;
      dist(k, best_s) = v;
    }
    active[static_cast<std::size_t>(best_t)] = false;
    sizes[static_cast<std::size_t>(best_s)] += sizes[static_cast<std::size_t>(best_t)];
    ids[static_cast<std::size_t>(best_s)] = new_id;
  }
  return out;
}

Labeling cut(const Dendrogram& dendro, int k) {
  const int m = dendro.leaves;
  if (k < 1 || k > m) {
    std::ostringstream os;
    os << "cut: K = " << k << " must lie in [1, " << m << "]";
    throw DomainError(os.str());
  }
  if (static_cast<int>(dendro.merges.size()) != m - 1) {
    throw ShapeError("cut: dendrogram must hold leaves - 1 merges");
  }
  // Union-find over all 2m-1 node ids.
  std::vector<int> parent(static_cast<std::size_t>(2 * m - 1));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int step = 0; step < m - k; ++step) {
    const Merge& mg = dendro.merges[static_cast<std::size_t>(step)];
    if (mg.a < 0 || mg.b < 0 || mg.new_id >= 2 * m - 1 || mg.a >= mg.new_id ||
        mg.b >= mg.new_id) {
      throw DomainError("cut: malformed merge record " + std::to_string(step));
    }
    parent[static_cast<std::size_t>(find(mg.a))] = mg.new_id;
    parent[static_cast<std::size_t>(find(mg.b))] = mg.new_id;
  }
  std::map<int, int> root_label;
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int leaf = 0; leaf < m; ++leaf) {
    const int root = find(leaf);
    const auto [it, inserted] = root_label.try_emplace(root, static_cast<int>(root_label.size()) + 1);
    labels[static_cast<std::size_t>(leaf)] = it->second;
  }
  return Labeling(std::move(labels));
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw ShapeError("adjusted_rand_index: labelings differ in length (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0;
  for (const auto& [key, c] : cells) index += pairs(c);
  double sum_a = 0.0;
  for (const auto& [key, c] : rows) sum_a += pairs(c);
  double sum_b = 0.0;
  for (const auto& [key, c] : cols) sum_b += pairs(c);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total == 0.0 ? 0.0 : sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double adjusted_rand_index(const Labeling& a, const Labeling& b) {
  return adjusted_rand_index(std::span<const int>(a.labels()), std::span<const int>(b.labels()));
}

SeparationMargin separation_margin(const DistanceMatrix& d, std::span<const int> truth) {
  if (static_cast<Eigen::Index>(truth.size()) != d.size()) {
    throw ShapeError("separation_margin: label count does not match distance matrix size");
  }
  SeparationMargin out{0.0, std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    for (Eigen::Index j = i + 1; j < d.size(); ++j) {
      if (truth[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(j)]) {
        out.max_within = std::max(out.max_within, d(i, j));
      } else {
        out.min_between = std::min(out.min_between, d(i, j));
      }
    }
  }
  return out;
}

}  // namespace mirrorclust
