#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorclust/cluster.hpp"
#include "mirrorclust/netmodel.hpp"

namespace mirrorclust {

/// Per-vertex latent walk in [0, 1]: start at c_tilde and at each of T steps
/// move up by delta with probability p.
struct RandomWalkConfig {
  double c_tilde = 0.1;
  double delta = 0.09;
  double p = 0.4;
  Eigen::Index n = 100;
  Eigen::Index T = 10;

  /// Step size (1 - c_tilde) / T, so walks can just reach 1.
  static RandomWalkConfig with_full_range(double c_tilde, double p, Eigen::Index n,
                                          Eigen::Index T);
  /// Throws DomainError on any violated constraint.
  void validate() const;
};

/// Random walk whose step probability switches after time change_t.
struct ChangepointConfig {
  RandomWalkConfig base;
  Eigen::Index change_t = 25;
  double p_before = 0.45;
  double p_after = 0.55;

  void validate() const;
};

/// T latent matrices (n x 1) for times 1..T; the start value is not
/// returned. Walk s consumes draws from one generator in vertex-major order.
std::vector<LatentPositions> random_walk_latents(const RandomWalkConfig& cfg, std::uint64_t seed);

/// p_before at t <= change_t, p_after afterward. Equal probabilities
/// reproduce random_walk_latents draw for draw.
std::vector<LatentPositions> changepoint_latents(const ChangepointConfig& cfg, std::uint64_t seed);

struct ReportCell {
  double x = 0.0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  /// Per-replicate statistic, in replicate order; failed replicates are absent.
  std::vector<double> values;
};

struct ExperimentReport {
  std::string name;
  std::string statistic;
  std::string grid_label;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<ReportCell> cells;
};

/// Mean, sample sd and linearly interpolated 5%/95% quantiles.
ReportCell summarize(double x, std::vector<double> values, std::size_t failures);

enum class Sweep { n, T };

struct MirrorErrorSetup {
  Sweep sweep = Sweep::n;
  std::vector<Eigen::Index> grid{50, 100, 200, 400, 800};
  double c_tilde = 0.1;
  double p = 0.4;
  /// Held fixed while the other is swept.
  Eigen::Index n = 100;
  Eigen::Index T = 10;
  Eigen::Index d = 1;
  Eigen::Index r = 1;
};

/// Per replicate: draw walk latents, build the true mirror from their exact
/// distance matrix, sample the networks, estimate the mirror, and record
/// procrustes_cost(estimate, truth) / sqrt(T).
ExperimentReport run_mirror_error_experiment(const MirrorErrorSetup& setup,
                                             std::size_t replicates, std::uint64_t seed,
                                             unsigned threads = 1);

struct ClusteringSetup {
  std::vector<Eigen::Index> n_grid{20, 30, 40, 80, 120, 200};
  Eigen::Index networks_per_cluster = 20;
  Eigen::Index T = 50;
  Eigen::Index change_t = 25;
  double c_tilde = 0.1;
  double p_low = 0.45;
  double p_high = 0.55;
  Eigen::Index d = 1;
  Eigen::Index r = 1;
  Linkage linkage = Linkage::average;
};

/// The two changepoint families of a clustering replicate: family 1 goes
/// p_low -> p_high, family 2 the reverse. Network i belongs to family
/// 1 + i / networks_per_cluster.
ChangepointConfig family_config(const ClusteringSetup& setup, Eigen::Index n, int family);

/// Per replicate: generate both families, run the full pipeline at K = 2,
/// and record the ARI against the planted labels.
ExperimentReport run_clustering_experiment(const ClusteringSetup& setup, std::size_t replicates,
                                           std::uint64_t seed, unsigned threads = 1);

/// Everything one clustering replicate produces; exposed for diagnostics.
struct ClusteringReplicate {
  std::vector<Mirror> mirrors;
  DistanceMatrix dstar;
  Dendrogram dendrogram;
  Labeling truth;
  Labeling estimate;
  double ari = 0.0;
};

ClusteringReplicate run_clustering_replicate(const ClusteringSetup& setup, Eigen::Index n,
                                             std::uint64_t seed, unsigned threads = 1);

}  // namespace mirrorclust
