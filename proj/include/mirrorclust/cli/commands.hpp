#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorclust/cluster.hpp"
#include "mirrorclust/embed.hpp"
#include "mirrorclust/simlab.hpp"
#include "mirrorclust/stability.hpp"

namespace mirrorclust::cli {

namespace fs = std::filesystem;

/// Bad command line; the front end exits with status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ClusterOptions {
  fs::path manifest;
  fs::path out;
  DimRule dim_rule = DimRule::fixed;
  Eigen::Index d = 1;
  /// Elbow search range when dim_rule is elbow.
  Eigen::Index max_rank = 10;
  Eigen::Index r = 1;
  int k = 2;
  Linkage linkage = Linkage::average;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool dense = false;
  bool force = false;
};

struct ClusterSummary {
  /// Embedding dimension actually used.
  Eigen::Index d = 0;
  std::vector<std::string> ids;
  DistanceMatrix dstar;
  Dendrogram dendrogram;
  Labeling labels;
  SeparationMargin margin;
  /// Set when every manifest network carries a label.
  std::optional<double> ari_vs_planted;
};

/// Runs the full pipeline on a manifest and writes mirrors/, distances/,
/// dstar.csv, dendrogram.json, labels.csv, margin.json and run-metadata.json.
ClusterSummary cmd_cluster(const ClusterOptions& opt);

struct GenerateOptions {
  std::string scenario = "rw";
  fs::path out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool force = false;
  Eigen::Index n = 100;
  /// Defaults to 10 for rw and 50 for changepoint.
  std::optional<Eigen::Index> T;
  double c_tilde = 0.1;
  /// rw only; defaults to (1 - c_tilde) / T.
  std::optional<double> delta;
  double p = 0.4;
  /// rw only.
  Eigen::Index networks = 1;
  /// changepoint only.
  Eigen::Index per_cluster = 20;
  Eigen::Index change_t = 25;
  double p_before = 0.45;
  double p_after = 0.55;
};

/// Writes <out>/manifest.json and one edge-list file per snapshot.
/// Returns the manifest path.
fs::path cmd_generate(const GenerateOptions& opt);

struct ExperimentOptions {
  std::string name;
  fs::path out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool force = false;
  std::size_t replicates = 50;
  Sweep sweep = Sweep::n;
  /// Overrides the default grid of the chosen experiment.
  std::vector<Eigen::Index> grid;
  std::optional<Eigen::Index> n;
  std::optional<Eigen::Index> T;
  Eigen::Index d = 1;
  Eigen::Index r = 1;
  std::optional<double> c_tilde;
  std::optional<double> p;
  std::optional<Eigen::Index> per_cluster;
  std::optional<Eigen::Index> change_t;
  Linkage linkage = Linkage::average;
};

inline const std::vector<std::string> kExperimentNames{"mirror-error", "clustering"};

/// Writes report.json and curve.csv. Unknown names raise UsageError.
ExperimentReport cmd_experiment(const ExperimentOptions& opt);

struct StabilityOptions {
  fs::path dendrogram;
  fs::path labels;
  fs::path out;
  int k_max = 10;
  JaccardVariant jaccard = JaccardVariant::weighted;
  /// Also write jaccard_K<k>.csv for every K.
  bool per_k_jaccard = false;
  bool force = false;
};

/// Writes contingency_K<k>.csv, max_rate_curve.csv, normalized_auc.csv and
/// jaccard_auc.csv.
void cmd_stability(const StabilityOptions& opt);

}  // namespace mirrorclust::cli
