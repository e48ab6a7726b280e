#include "mirrorclust/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "mirrorclust/embed.hpp"
#include "mirrorclust/errors.hpp"
#include "mirrorclust/mirror.hpp"
#include "mirrorclust/numkernel.hpp"
#include "mirrorclust/parallel.hpp"
#include "mirrorclust/seeding.hpp"

namespace mirrorclust {

namespace {

std::vector<LatentPositions> walk(const RandomWalkConfig& cfg, const std::vector<double>& step_p,
                                  std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> xs(static_cast<std::size_t>(cfg.T),
                                  Eigen::MatrixXd(cfg.n, 1));
  std::mt19937_64 rng(seed);
  for (Eigen::Index s = 0; s < cfg.n; ++s) {
    double x = cfg.c_tilde;
    for (Eigen::Index t = 0; t < cfg.T; ++t) {
      if (uniform01(rng) < step_p[static_cast<std::size_t>(t)]) x += cfg.delta;
      xs[static_cast<std::size_t>(t)](s, 0) = x;
    }
  }
  std::vector<LatentPositions> out;
  out.reserve(xs.size());
  for (auto& m : xs) out.emplace_back(std::move(m));
  return out;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Samples and embeds one snapshot at a time, so a network is never held in
// memory. Draws match sample_dynamic_network(xs, seed, id).
Mirror mirror_from_latents(const std::vector<LatentPositions>& xs, std::uint64_t seed,
                           const std::string& id, Eigen::Index d, Eigen::Index r) {
  std::vector<LatentPositions> embedded;
  embedded.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    embedded.push_back(ase(rdpg_sample(xs[t], derive_seed(seed, id, t)), d));
  }
  return cmds(latent_distance_matrix(embedded), r);
}

}  // namespace

RandomWalkConfig RandomWalkConfig::with_full_range(double c_tilde, double p, Eigen::Index n,
                                                   Eigen::Index T) {
  RandomWalkConfig cfg{c_tilde, T > 0 ? (1.0 - c_tilde) / static_cast<double>(T) : 0.0, p, n, T};
  return cfg;
}

void RandomWalkConfig::validate() const {
  std::ostringstream os;
  if (!(c_tilde >= 0.0)) os << "c_tilde must be >= 0; ";
  if (!(delta > 0.0)) os << "delta must be > 0; ";
  if (!(p > 0.0 && p < 1.0)) os << "p must lie in (0, 1); ";
  if (n < 1) os << "n must be >= 1; ";
  if (T < 1) os << "T must be >= 1; ";
  if (!(c_tilde + delta * static_cast<double>(T) <= 1.0 + 1e-12)) {
    os << "c_tilde + delta * T must be <= 1; ";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw DomainError("random walk config: " + msg.substr(0, msg.size() - 2));
}

void ChangepointConfig::validate() const {
  base.validate();
  if (change_t < 1 || change_t >= base.T) {
    throw DomainError("changepoint config: change_t must satisfy 1 <= change_t < T");
  }
  if (!(p_before > 0.0 && p_before < 1.0) || !(p_after > 0.0 && p_after < 1.0)) {
    throw DomainError("changepoint config: step probabilities must lie in (0, 1)");
  }
}

std::vector<LatentPositions> random_walk_latents(const RandomWalkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return walk(cfg, std::vector<double>(static_cast<std::size_t>(cfg.T), cfg.p), seed);
}

std::vector<LatentPositions> changepoint_latents(const ChangepointConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::vector<double> step_p(static_cast<std::size_t>(cfg.base.T));
  for (Eigen::Index t = 0; t < cfg.base.T; ++t) {
    // Index t is time t + 1.
    step_p[static_cast<std::size_t>(t)] = t + 1 <= cfg.change_t ? cfg.p_before : cfg.p_after;
  }
  return walk(cfg.base, step_p, seed);
}

ReportCell summarize(double x, std::vector<double> values, std::size_t failures) {
  ReportCell cell;
  cell.x = x;
  cell.replicates = values.size() + failures;
  cell.failures = failures;
  cell.values = values;
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.mean = cell.sd = cell.q05 = cell.q95 = nan;
    return cell;
  }
  const double count = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  cell.mean = sum / count;
  double ss = 0.0;
  for (const double v : values) ss += (v - cell.mean) * (v - cell.mean);
  cell.sd = values.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  cell.q05 = quantile(values, 0.05);
  cell.q95 = quantile(values, 0.95);
  return cell;
}

ExperimentReport run_mirror_error_experiment(const MirrorErrorSetup& setup,
                                             std::size_t replicates, std::uint64_t seed,
                                             unsigned threads) {
  if (setup.grid.empty()) throw DomainError("mirror-error experiment: grid is empty");
  if (replicates < 1) throw DomainError("mirror-error experiment: need at least 1 replicate");

  ExperimentReport report;
  report.name = "mirror-error";
  report.statistic = "procrustes_cost(estimated_mirror, true_mirror) / sqrt(T)";
  report.grid_label = setup.sweep == Sweep::n ? "n" : "T";
  report.seed = seed;
  report.replicates = replicates;

  for (const Eigen::Index value : setup.grid) {
    const Eigen::Index n = setup.sweep == Sweep::n ? value : setup.n;
    const Eigen::Index t = setup.sweep == Sweep::T ? value : setup.T;
    const RandomWalkConfig cfg = RandomWalkConfig::with_full_range(setup.c_tilde, setup.p, n, t);
    cfg.validate();
    const std::string cell_id = "mirror-error:" + report.grid_label + "=" + std::to_string(value);

    std::vector<std::optional<double>> stats(replicates);
    parallel_for(replicates, threads, [&](std::size_t k) {
      const std::uint64_t rep_seed = derive_seed(seed, cell_id, k);
      const auto latents = random_walk_latents(cfg, derive_seed(rep_seed, "latents", 0));
      try {
        const Mirror truth = cmds(latent_distance_matrix(latents), setup.r);
        const Mirror estimate =
            mirror_from_latents(latents, derive_seed(rep_seed, "network", 0), "", setup.d, setup.r);
        stats[k] = procrustes_cost(estimate.matrix, truth.matrix) /
                   std::sqrt(static_cast<double>(t));
      } catch (const DegenerateSpectrumError&) {
        stats[k] = std::nullopt;
      }
    });

    std::vector<double> values;
    std::size_t failures = 0;
    for (const auto& s : stats) {
      if (s) {
        values.push_back(*s);
      } else {
        ++failures;
      }
    }
    report.cells.push_back(summarize(static_cast<double>(value), std::move(values), failures));
  }
  return report;
}

ChangepointConfig family_config(const ClusteringSetup& setup, Eigen::Index n, int family) {
  ChangepointConfig cfg;
  cfg.base = RandomWalkConfig::with_full_range(setup.c_tilde, setup.p_low, n, setup.T);
  cfg.change_t = setup.change_t;
  cfg.p_before = family == 1 ? setup.p_low : setup.p_high;
  cfg.p_after = family == 1 ? setup.p_high : setup.p_low;
  cfg.validate();
  return cfg;
}

ClusteringReplicate run_clustering_replicate(const ClusteringSetup& setup, Eigen::Index n,
                                             std::uint64_t seed, unsigned threads) {
  const Eigen::Index per = setup.networks_per_cluster;
  if (per < 1) throw DomainError("clustering experiment: networks_per_cluster must be >= 1");
  const auto m = static_cast<std::size_t>(2 * per);
  const ChangepointConfig families[2] = {family_config(setup, n, 1), family_config(setup, n, 2)};

  ClusteringReplicate out;
  out.mirrors.resize(m);
  std::vector<int> truth(m);
  for (std::size_t i = 0; i < m; ++i) truth[i] = 1 + static_cast<int>(i / static_cast<std::size_t>(per));
  parallel_for(m, threads, [&](std::size_t i) {
    const std::string id = "net" + std::to_string(i);
    const auto latents =
        changepoint_latents(families[truth[i] - 1], derive_seed(seed, "latents:" + id, 0));
    out.mirrors[i] = mirror_from_latents(latents, derive_seed(seed, "network", 0), id, setup.d,
                                         setup.r);
  });
  out.dstar = mirror_distance_matrix(out.mirrors);
  out.dendrogram = agglomerate(out.dstar, setup.linkage);
  out.truth = Labeling(truth);
  out.estimate = cut(out.dendrogram, 2);
  out.ari = adjusted_rand_index(out.estimate, out.truth);
  return out;
}

ExperimentReport run_clustering_experiment(const ClusteringSetup& setup, std::size_t replicates,
                                           std::uint64_t seed, unsigned threads) {
  if (setup.n_grid.empty()) throw DomainError("clustering experiment: grid is empty");
  if (replicates < 1) throw DomainError("clustering experiment: need at least 1 replicate");

  ExperimentReport report;
  report.name = "clustering";
  report.statistic = "adjusted_rand_index(estimated_labels, planted_labels) at K=2";
  report.grid_label = "n";
  report.seed = seed;
  report.replicates = replicates;

  for (const Eigen::Index n : setup.n_grid) {
    const std::string cell_id = "clustering:n=" + std::to_string(n);
    std::vector<std::optional<double>> stats(replicates);
    parallel_for(replicates, threads, [&](std::size_t k) {
      try {
        stats[k] = run_clustering_replicate(setup, n, derive_seed(seed, cell_id, k)).ari;
      } catch (const DegenerateSpectrumError&) {
        stats[k] = std::nullopt;
      }
    });
    std::vector<double> values;
    std::size_t failures = 0;
    for (const auto& s : stats) {
      if (s) {
        values.push_back(*s);
      } else {
        ++failures;
      }
    }
    report.cells.push_back(summarize(static_cast<double>(n), std::move(values), failures));
  }
  return report;
}

}  // namespace mirrorclust
