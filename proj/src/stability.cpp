#include "mirrorclust/stability.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "mirrorclust/errors.hpp"

namespace mirrorclust {

JaccardVariant parse_jaccard_variant(std::string_view name) {
  if (name == "weighted") return JaccardVariant::weighted;
  if (name == "support") return JaccardVariant::support;
  throw DomainError("unknown Jaccard variant '" + std::string(name) +
                    "' (expected weighted or support)");
}

Eigen::MatrixXd ContingencyTable::frequency_rates() const {
  Eigen::MatrixXd rates = counts.cast<double>();
  for (Eigen::Index i = 0; i < rates.rows(); ++i) {
    if (label_sizes[i] > 0) rates.row(i) /= static_cast<double>(label_sizes[i]);
  }
  return rates;
}

int label_count(std::span<const int> labels_true) {
  if (labels_true.empty()) throw DomainError("label vector is empty");
  const int l = *std::max_element(labels_true.begin(), labels_true.end());
  std::vector<bool> seen(static_cast<std::size_t>(std::max(l, 0)) + 1, false);
  for (const int v : labels_true) {
    if (v < 1) throw DomainError("labels must be >= 1");
    seen[static_cast<std::size_t>(v)] = true;
  }
  for (int v = 1; v <= l; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) {
      throw DomainError("label " + std::to_string(v) + " has no members (labels must be 1..L)");
    }
  }
  return l;
}

ContingencyTable contingency(std::span<const int> labels_true, const Labeling& clusters, int L,
                             int K) {
  if (labels_true.size() != clusters.size()) {
    throw ShapeError("contingency: label and cluster vectors differ in length");
  }
  ContingencyTable table{Eigen::MatrixXi::Zero(L, K), Eigen::VectorXi::Zero(L)};
  for (std::size_t s = 0; s < labels_true.size(); ++s) {
    const int i = labels_true[s];
    const int k = clusters[s];
    if (i < 1 || i > L) {
      std::ostringstream os;
      os << "contingency: label " << i << " of item " << s << " outside 1.." << L;
      throw DomainError(os.str());
    }
    if (k < 1 || k > K) {
      std::ostringstream os;
      os << "contingency: cluster " << k << " of item " << s << " outside 1.." << K;
      throw DomainError(os.str());
    }
    ++table.counts(i - 1, k - 1);
    ++table.label_sizes[i - 1];
  }
  return table;
}

StabilityCurve max_frequency_curve(const Dendrogram& dendro, std::span<const int> labels_true,
                                   int k_max) {
  if (static_cast<int>(labels_true.size()) != dendro.leaves) {
    throw ShapeError("max_frequency_curve: " + std::to_string(labels_true.size()) +
                     " labels for " + std::to_string(dendro.leaves) + " leaves");
  }
  if (k_max < 1 || k_max > dendro.leaves) {
    throw DomainError("max_frequency_curve: K_max must lie in [1, number of leaves]");
  }
  const int l = label_count(labels_true);
  StabilityCurve curve;
  curve.max_rate.resize(l, k_max);
  for (int k = 1; k <= k_max; ++k) {
    curve.k_values.push_back(k);
    const ContingencyTable table = contingency(labels_true, cut(dendro, k), l, k);
    curve.max_rate.col(k - 1) = table.frequency_rates().rowwise().maxCoeff();
  }
  return curve;
}

double normalized_trapezoid(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("normalized AUC needs K_max >= 2");
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) area += 0.5 * (values[k] + values[k + 1]);
  return area / static_cast<double>(values.size() - 1);
}

Eigen::VectorXd normalized_auc(const StabilityCurve& curve) {
  if (curve.max_rate.cols() < 2) throw DomainError("normalized_auc: K_max must be >= 2");
  Eigen::VectorXd out(curve.max_rate.rows());
  std::vector<double> row(static_cast<std::size_t>(curve.max_rate.cols()));
  for (Eigen::Index i = 0; i < curve.max_rate.rows(); ++i) {
    for (Eigen::Index k = 0; k < curve.max_rate.cols(); ++k) {
      row[static_cast<std::size_t>(k)] = curve.max_rate(i, k);
    }
    out[i] = normalized_trapezoid(row);
  }
  return out;
}

double jaccard_distance(const Eigen::VectorXd& ri, const Eigen::VectorXd& rj,
                        JaccardVariant variant) {
  if (ri.size() != rj.size()) throw ShapeError("jaccard_distance: vectors differ in length");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < ri.size(); ++k) {
    double a = ri[k];
    double b = rj[k];
    if (variant == JaccardVariant::support) {
      a = a > 0.0 ? 1.0 : 0.0;
      b = b > 0.0 ? 1.0 : 0.0;
    }
    num += std::min(a, b);
    den += std::max(a, b);
  }
  if (den == 0.0) return 0.0;
  return std::clamp(1.0 - num / den, 0.0, 1.0);
}

namespace {

Eigen::MatrixXd distances_from_rates(const Eigen::MatrixXd& rates, JaccardVariant variant) {
  const Eigen::Index l = rates.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i + 1; j < l; ++j) {
      out(i, j) = jaccard_distance(rates.row(i).transpose(), rates.row(j).transpose(), variant);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd jaccard_label_distances(const Dendrogram& dendro,
                                        std::span<const int> labels_true, int k,
                                        JaccardVariant variant) {
  if (static_cast<int>(labels_true.size()) != dendro.leaves) {
    throw ShapeError("jaccard_label_distances: label count does not match leaves");
  }
  const int l = label_count(labels_true);
  const ContingencyTable table = contingency(labels_true, cut(dendro, k), l, k);
  return distances_from_rates(table.frequency_rates(), variant);
}

JaccardSweep jaccard_label_sweep(const Dendrogram& dendro, std::span<const int> labels_true,
                                 int k_max, JaccardVariant variant) {
  if (k_max < 2) throw DomainError("jaccard_label_sweep: K_max must be >= 2");
  if (k_max > dendro.leaves) {
    throw DomainError("jaccard_label_sweep: K_max exceeds the number of leaves");
  }
  JaccardSweep sweep;
  for (int k = 1; k <= k_max; ++k) {
    sweep.per_k.push_back(jaccard_label_distances(dendro, labels_true, k, variant));
  }
  const Eigen::Index l = sweep.per_k.front().rows();
  sweep.normalized_auc = Eigen::MatrixXd::Zero(l, l);
  std::vector<double> values(static_cast<std::size_t>(k_max));
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      for (int k = 0; k < k_max; ++k) {
        values[static_cast<std::size_t>(k)] = sweep.per_k[static_cast<std::size_t>(k)](i, j);
      }
      sweep.normalized_auc(i, j) = normalized_trapezoid(values);
    }
  }
  return sweep;
}

}  // namespace mirrorclust
