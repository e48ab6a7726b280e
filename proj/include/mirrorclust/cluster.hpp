#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mirrorclust/mirror.hpp"

namespace mirrorclust {

enum class Linkage { single, complete, average };

Linkage parse_linkage(std::string_view name);
std::string_view to_string(Linkage linkage);

struct Merge {
  int a = 0;  // smaller node id
  int b = 0;
  double height = 0.0;
  int new_id = 0;
};

/// Agglomerative merge history. Leaves are 0..m-1; the k-th merge creates
/// node m + k.
struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;
};

/// Cluster ids 1..K, each used at least once.
class Labeling {
 public:
  Labeling() = default;
  /// Throws DomainError unless the ids are exactly {1, ..., max id}.
  explicit Labeling(std::vector<int> labels);

  const std::vector<int>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  int num_clusters() const noexcept { return clusters_; }
  int operator[](std::size_t i) const { return labels_[i]; }

 private:
  std::vector<int> labels_;
  int clusters_ = 0;
};

/// Entry (i, j) is procrustes_cost(M_i, M_j) / sqrt(T).
DistanceMatrix mirror_distance_matrix(const std::vector<Mirror>& mirrors, unsigned threads = 1);

/// Naive O(m^3) agglomeration with Lance-Williams updates. Among equally
/// close pairs the one with the smallest (a, b) node ids merges first.
Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage = Linkage::average);

/// Replays all but the last K-1 merges. Clusters are numbered in order of
/// their smallest leaf.
Labeling cut(const Dendrogram& dendro, int k);

/// Permutation-model adjusted Rand index. Two identical trivial partitions
/// (all together, or all apart) score 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);
double adjusted_rand_index(const Labeling& a, const Labeling& b);

struct SeparationMargin {
  double max_within = 0.0;
  double min_between = 0.0;

  /// Every same-label pair is closer than every different-label pair.
  bool certified() const noexcept { return max_within < min_between; }
};

/// Largest same-label and smallest different-label distance. An empty side
/// reports 0 (within) or +infinity (between).
SeparationMargin separation_margin(const DistanceMatrix& d, std::span<const int> truth);

}  // namespace mirrorclust
