#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mirrorclust/cluster.hpp"

namespace mirrorclust {

/// counts(i, k): members of label i + 1 that fall in cluster k + 1.
struct ContingencyTable {
  Eigen::MatrixXi counts;
  Eigen::VectorXi label_sizes;

  /// counts divided by label size; each row sums to 1.
  Eigen::MatrixXd frequency_rates() const;
};

/// max_rate(i, k): the largest frequency rate of label i + 1 when the
/// dendrogram is cut into k_values[k] clusters.
struct StabilityCurve {
  std::vector<int> k_values;
  Eigen::MatrixXd max_rate;
};

enum class JaccardVariant { weighted, support };

JaccardVariant parse_jaccard_variant(std::string_view name);

/// Labels must lie in 1..L and clusters in 1..K; throws DomainError otherwise.
ContingencyTable contingency(std::span<const int> labels_true, const Labeling& clusters, int L,
                             int K);

/// Number of labels L, after checking that every id in 1..L occurs.
int label_count(std::span<const int> labels_true);

StabilityCurve max_frequency_curve(const Dendrogram& dendro, std::span<const int> labels_true,
                                   int k_max);

/// Trapezoid rule on the integer K knots, divided by (K_max - 1).
Eigen::VectorXd normalized_auc(const StabilityCurve& curve);

/// Same rule for one sampled curve; `values[k]` is the value at K = k + 1.
double normalized_trapezoid(std::span<const double> values);

/// Distance 1 - sum_k min(r_ik, r_jk) / sum_k max(r_ik, r_jk) between the
/// frequency-rate rows of two labels. The support variant uses the sets of
/// clusters with a nonzero rate instead.
double jaccard_distance(const Eigen::VectorXd& ri, const Eigen::VectorXd& rj,
                        JaccardVariant variant = JaccardVariant::weighted);

/// L x L distances between label distributions after cutting into K clusters.
Eigen::MatrixXd jaccard_label_distances(const Dendrogram& dendro,
                                        std::span<const int> labels_true, int k,
                                        JaccardVariant variant = JaccardVariant::weighted);

struct JaccardSweep {
  /// per_k[k - 1] is the matrix for K = k.
  std::vector<Eigen::MatrixXd> per_k;
  /// Entrywise normalized AUC over K = 1..K_max.
  Eigen::MatrixXd normalized_auc;
};

JaccardSweep jaccard_label_sweep(const Dendrogram& dendro, std::span<const int> labels_true,
                                 int k_max, JaccardVariant variant = JaccardVariant::weighted);

}  // namespace mirrorclust
