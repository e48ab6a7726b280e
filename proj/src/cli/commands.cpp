#include "mirrorclust/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "mirrorclust/cli/io.hpp"
#include "mirrorclust/errors.hpp"
#include "mirrorclust/mirror.hpp"
#include "mirrorclust/parallel.hpp"
#include "mirrorclust/seeding.hpp"

namespace mirrorclust::cli {

using Eigen::Index;
using nlohmann::json;

namespace {

std::string_view to_string(DimRule rule) { return rule == DimRule::fixed ? "fixed" : "elbow"; }

std::string_view to_string(Sweep sweep) { return sweep == Sweep::n ? "n" : "T"; }

std::string_view to_string(JaccardVariant v) {
  return v == JaccardVariant::weighted ? "weighted" : "support";
}

json versions() {
  return {{"mirrorclust", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}};
}

void check_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string::npos)
    throw IngestionError("network id \"" + id + "\" cannot be used as a file name");
}

std::string padded(Index value, Index width) {
  auto s = std::to_string(value);
  if (static_cast<Index>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::string spectrum_dump(const std::vector<double>& spectrum) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < spectrum.size(); ++i) os << (i ? ", " : "") << spectrum[i];
  os << "]";
  return os.str();
}

json margin_json(const SeparationMargin& m) {
  json j{{"max_within", m.max_within}, {"certified", m.certified()}};
  // JSON has no infinity; a single cluster has no between pairs.
  if (std::isfinite(m.min_between))
    j["min_between"] = m.min_between;
  else
    j["min_between"] = nullptr;
  return j;
}

Index elbow_dimension(const DatasetManifest& manifest, Index max_rank, bool dense,
                      unsigned threads) {
  const auto m = manifest.networks.size();
  const auto T = static_cast<std::size_t>(manifest.T);
  // The scree window is the top 2 * max_rank magnitudes. Fed the whole
  // spectrum, the noise bulk dominates the pooled scatter and the split runs
  // to max_rank.
  const Index window = std::min(2 * max_rank, manifest.n);
  const Index rank = std::min(max_rank, window);
  std::vector<Index> chosen(m * T);
  parallel_for(m, threads, [&](std::size_t i) {
    const auto& net = manifest.networks[i];
    for (std::size_t t = 0; t < T; ++t) {
      const auto& path = net.snapshots[t];
      const auto a = dense ? read_dense_csv(path) : read_edge_list(path);
      if (a.n() != manifest.n)
        throw IngestionError(path.string() + ": snapshot has n = " + std::to_string(a.n()) +
                             ", manifest declares n = " + std::to_string(manifest.n));
      Eigen::VectorXd mags = magnitude_spectrum(a.matrix()).cwiseAbs();
      std::sort(mags.begin(), mags.end(), std::greater<>());
      chosen[i * T + t] = select_dim_elbow(mags.head(window), rank);
    }
  });
  // One common d keeps every latent matrix the same width; the upper median
  // is robust to a few snapshots with a spurious elbow.
  std::sort(chosen.begin(), chosen.end());
  return chosen[chosen.size() / 2];
}

}  // namespace

ClusterSummary cmd_cluster(const ClusterOptions& opt) {
  const auto manifest = read_manifest(opt.manifest);
  const auto m = static_cast<Index>(manifest.networks.size());
  if (m < 2) throw DomainError("need ≥2 networks to cluster");
  if (opt.k < 1 || opt.k > m)
    throw DomainError("K = " + std::to_string(opt.k) + " must lie in [1, m = " +
                      std::to_string(m) + "]");
  if (opt.r < 1 || opt.r >= manifest.T)
    throw DomainError("r = " + std::to_string(opt.r) + " must lie in [1, T - 1 = " +
                      std::to_string(manifest.T - 1) + "]");
  if (opt.dim_rule == DimRule::fixed && (opt.d < 1 || opt.d > manifest.n))
    throw DomainError("d = " + std::to_string(opt.d) + " must lie in [1, n = " +
                      std::to_string(manifest.n) + "]");
  if (opt.dim_rule == DimRule::elbow && opt.max_rank < 1)
    throw DomainError("max rank must be >= 1");
  for (const auto& net : manifest.networks) check_id(net.id);

  ClusterSummary summary;
  summary.d = opt.dim_rule == DimRule::fixed
                  ? opt.d
                  : elbow_dimension(manifest, opt.max_rank, opt.dense, opt.threads);

  std::vector<Mirror> mirrors(m);
  std::vector<DistanceMatrix> latent(m);
  parallel_for(static_cast<std::size_t>(m), opt.threads, [&](std::size_t i) {
    const auto& entry = manifest.networks[i];
    std::vector<LatentPositions> xs;
    {
      const auto net = load_network(entry, manifest.n, opt.dense);
      xs.reserve(net.snapshots.size());
      for (const auto& a : net.snapshots) xs.push_back(ase(a, summary.d));
    }
    latent[i] = latent_distance_matrix(xs);
    try {
      mirrors[i] = cmds(latent[i], opt.r);
    } catch (const DegenerateSpectrumError& e) {
      throw DegenerateSpectrumError("network \"" + entry.id + "\": " + e.what() +
                                        "; spectrum " + spectrum_dump(e.spectrum()),
                                    e.spectrum());
    }
  });

  for (const auto& net : manifest.networks) summary.ids.push_back(net.id);
  summary.dstar = mirror_distance_matrix(mirrors, opt.threads);
  summary.dendrogram = agglomerate(summary.dstar, opt.linkage);
  summary.labels = cut(summary.dendrogram, opt.k);
  summary.margin = separation_margin(summary.dstar, summary.labels.labels());

  const bool labeled = std::all_of(manifest.networks.begin(), manifest.networks.end(),
                                   [](const ManifestNetwork& n) { return n.label.has_value(); });
  std::optional<Labeling> planted;
  if (labeled) {
    std::vector<int> truth;
    for (const auto& net : manifest.networks) truth.push_back(*net.label);
    planted = Labeling(std::move(truth));
    summary.ari_vs_planted = adjusted_rand_index(summary.labels, *planted);
  }

  const json config{{"manifest", opt.manifest.generic_string()},
                    {"dim_rule", to_string(opt.dim_rule)},
                    {"d", opt.dim_rule == DimRule::fixed ? json(opt.d) : json("auto")},
                    {"max_rank", opt.max_rank},
                    {"d_used", summary.d},
                    {"r", opt.r},
                    {"k", opt.k},
                    {"linkage", mirrorclust::to_string(opt.linkage)},
                    {"dense", opt.dense},
                    {"seed", opt.seed}};

  StagedDirectory dir(opt.out, opt.force);
  const auto& root = dir.path();
  fs::create_directory(root / "mirrors");
  fs::create_directory(root / "distances");
  for (Index i = 0; i < m; ++i) {
    const auto& id = summary.ids[i];
    write_matrix_csv(root / "mirrors" / (id + ".csv"), numbered("m", opt.r), mirrors[i].matrix);
    write_matrix_csv(root / "distances" / (id + ".csv"), numbered("t", manifest.T),
                     latent[i].matrix());
  }
  write_matrix_csv(root / "dstar.csv", summary.ids, summary.dstar.matrix());

  auto dendro = to_json(summary.dendrogram);
  dendro["ids"] = summary.ids;
  dendro["seed"] = opt.seed;
  dendro["config"] = config;
  write_json(root / "dendrogram.json", dendro);

  {
    std::ofstream out(root / "labels.csv");
    out << "id,label\n";
    for (Index i = 0; i < m; ++i) out << summary.ids[i] << ',' << summary.labels[i] << '\n';
    if (!out) throw IngestionError((root / "labels.csv").string() + ": write failed");
  }

  json margin{{"estimated", margin_json(summary.margin)}, {"seed", opt.seed}, {"config", config}};
  if (planted) {
    margin["planted"] = margin_json(separation_margin(summary.dstar, planted->labels()));
    margin["ari_vs_planted"] = *summary.ari_vs_planted;
  }
  write_json(root / "margin.json", margin);

  json tails = json::object();
  for (Index i = 0; i < m; ++i) tails[summary.ids[i]] = mirrors[i].spectrum_tail;
  write_json(root / "run-metadata.json", {{"command", "cluster"},
                                          {"seed", opt.seed},
                                          {"threads", opt.threads},
                                          {"config", config},
                                          {"m", m},
                                          {"T", manifest.T},
                                          {"n", manifest.n},
                                          {"spectrum_tail", tails},
                                          {"versions", versions()}});
  dir.commit();
  return summary;
}

fs::path cmd_generate(const GenerateOptions& opt) {
  const bool rw = opt.scenario == "rw";
  if (!rw && opt.scenario != "changepoint")
    throw UsageError("unknown scenario \"" + opt.scenario + "\"; valid: rw, changepoint");
  const Index T = opt.T.value_or(rw ? 10 : 50);

  // Each entry pairs a network with the walk that drives it.
  struct Plan {
    std::string id;
    std::optional<int> label;
    bool changepoint = false;
    RandomWalkConfig walk;
    ChangepointConfig cp;
  };
  std::vector<Plan> plans;
  json generator;
  if (rw) {
    if (opt.networks < 1) throw DomainError("networks must be >= 1");
    auto cfg = opt.delta ? RandomWalkConfig{opt.c_tilde, *opt.delta, opt.p, opt.n, T}
                         : RandomWalkConfig::with_full_range(opt.c_tilde, opt.p, opt.n, T);
    cfg.validate();
    for (Index i = 0; i < opt.networks; ++i)
      plans.push_back({"net" + std::to_string(i), std::nullopt, false, cfg, {}});
    generator = {{"scenario", "rw"},     {"n", cfg.n},           {"T", cfg.T},
                 {"c_tilde", cfg.c_tilde}, {"delta", cfg.delta}, {"p", cfg.p},
                 {"networks", opt.networks}, {"seed", opt.seed}};
  } else {
    if (opt.per_cluster < 1) throw DomainError("per-cluster must be >= 1");
    ClusteringSetup setup;
    setup.networks_per_cluster = opt.per_cluster;
    setup.T = T;
    setup.change_t = opt.change_t;
    setup.c_tilde = opt.c_tilde;
    setup.p_low = opt.p_before;
    setup.p_high = opt.p_after;
    const ChangepointConfig families[2] = {family_config(setup, opt.n, 1),
                                           family_config(setup, opt.n, 2)};
    for (Index i = 0; i < 2 * opt.per_cluster; ++i) {
      const int family = 1 + static_cast<int>(i / opt.per_cluster);
      plans.push_back({"net" + std::to_string(i), family, true, {}, families[family - 1]});
    }
    generator = {{"scenario", "changepoint"}, {"n", opt.n},
                 {"T", T},                    {"change_t", opt.change_t},
                 {"c_tilde", opt.c_tilde},    {"p_before", opt.p_before},
                 {"p_after", opt.p_after},    {"per_cluster", opt.per_cluster},
                 {"delta", families[0].base.delta}, {"seed", opt.seed}};
  }

  StagedDirectory dir(opt.out, opt.force);
  const auto& root = dir.path();
  const auto width = static_cast<Index>(std::to_string(T - 1).size());
  DatasetManifest manifest;
  manifest.m = static_cast<Index>(plans.size());
  manifest.T = T;
  manifest.n = opt.n;
  manifest.generator = generator;
  manifest.networks.resize(plans.size());
  parallel_for(plans.size(), opt.threads, [&](std::size_t i) {
    const auto& s = plans[i];
    const auto latent_seed = derive_seed(opt.seed, "latents:" + s.id, 0);
    const auto latents = s.changepoint ? changepoint_latents(s.cp, latent_seed)
                                       : random_walk_latents(s.walk, latent_seed);
    auto& entry = manifest.networks[i];
    entry.id = s.id;
    entry.label = s.label;
    fs::create_directory(root / s.id);
    const auto network_seed = derive_seed(opt.seed, "network", 0);
    for (Index t = 0; t < T; ++t) {
      const auto a = rdpg_sample(latents[t], derive_seed(network_seed, s.id, t));
      const auto path = root / s.id / ("t" + padded(t, width) + ".edges");
      write_edge_list(path, a);
      entry.snapshots.push_back(path);
    }
  });
  write_manifest(root / "manifest.json", manifest);
  dir.commit();
  return fs::path(opt.out) / "manifest.json";
}

ExperimentReport cmd_experiment(const ExperimentOptions& opt) {
  if (std::find(kExperimentNames.begin(), kExperimentNames.end(), opt.name) ==
      kExperimentNames.end())
    throw UsageError("unknown experiment \"" + opt.name + "\"; valid: mirror-error, clustering");
  if (opt.replicates < 1) throw DomainError("replicates must be >= 1");

  ExperimentReport report;
  json config{{"name", opt.name}, {"replicates", opt.replicates}, {"seed", opt.seed}};
  if (opt.name == "mirror-error") {
    if (opt.per_cluster || opt.change_t)
      throw UsageError("--per-cluster and --change-t apply to the clustering experiment only");
    MirrorErrorSetup setup;
    setup.sweep = opt.sweep;
    if (opt.sweep == Sweep::T) setup.grid = {20, 30, 40, 50, 70, 100};
    if (!opt.grid.empty()) setup.grid = opt.grid;
    if (opt.n) setup.n = *opt.n;
    if (opt.T) setup.T = *opt.T;
    if (opt.c_tilde) setup.c_tilde = *opt.c_tilde;
    if (opt.p) setup.p = *opt.p;
    setup.d = opt.d;
    setup.r = opt.r;
    config.update({{"sweep", to_string(setup.sweep)},
                   {"grid", setup.grid},
                   {"n", setup.n},
                   {"T", setup.T},
                   {"c_tilde", setup.c_tilde},
                   {"p", setup.p},
                   {"d", setup.d},
                   {"r", setup.r}});
    report = run_mirror_error_experiment(setup, opt.replicates, opt.seed, opt.threads);
  } else {
    if (opt.p || opt.n || opt.sweep != Sweep::n)
      throw UsageError("--p, --n and --sweep apply to the mirror-error experiment only");
    ClusteringSetup setup;
    if (!opt.grid.empty()) setup.n_grid = opt.grid;
    if (opt.T) setup.T = *opt.T;
    if (opt.c_tilde) setup.c_tilde = *opt.c_tilde;
    if (opt.per_cluster) setup.networks_per_cluster = *opt.per_cluster;
    if (opt.change_t) setup.change_t = *opt.change_t;
    setup.d = opt.d;
    setup.r = opt.r;
    setup.linkage = opt.linkage;
    config.update({{"grid", setup.n_grid},
                   {"per_cluster", setup.networks_per_cluster},
                   {"T", setup.T},
                   {"change_t", setup.change_t},
                   {"c_tilde", setup.c_tilde},
                   {"p_low", setup.p_low},
                   {"p_high", setup.p_high},
                   {"d", setup.d},
                   {"r", setup.r},
                   {"linkage", mirrorclust::to_string(setup.linkage)}});
    report = run_clustering_experiment(setup, opt.replicates, opt.seed, opt.threads);
  }

  StagedDirectory dir(opt.out, opt.force);
  auto j = to_json(report);
  j["config"] = config;
  j["versions"] = versions();
  write_json(dir.path() / "report.json", j);
  write_curve_csv(dir.path() / "curve.csv", report);
  dir.commit();
  return report;
}

void cmd_stability(const StabilityOptions& opt) {
  const auto dendro = read_dendrogram(opt.dendrogram);
  // Carry the clustering run's seed forward when the dendrogram records one.
  const auto seed = read_json(opt.dendrogram).value("seed", json(nullptr));
  const auto labels = read_labels(opt.labels);
  if (static_cast<int>(labels.size()) != dendro.leaves)
    throw ShapeError(opt.labels.string() + " has " + std::to_string(labels.size()) +
                     " labels but the dendrogram has " + std::to_string(dendro.leaves) +
                     " leaves");
  if (opt.k_max < 2) throw DomainError("K_max must be >= 2, got " + std::to_string(opt.k_max));
  if (opt.k_max > dendro.leaves)
    throw DomainError("K_max = " + std::to_string(opt.k_max) + " exceeds the " +
                      std::to_string(dendro.leaves) + " leaves");
  const int L = label_count(labels);

  const auto curve = max_frequency_curve(dendro, labels, opt.k_max);
  const auto auc = normalized_auc(curve);
  const auto jac = jaccard_label_sweep(dendro, labels, opt.k_max, opt.jaccard);

  StagedDirectory dir(opt.out, opt.force);
  const auto& root = dir.path();
  for (int k = 1; k <= opt.k_max; ++k) {
    const auto table = contingency(labels, cut(dendro, k), L, k);
    Eigen::MatrixXi m(L, k + 1);
    m.col(0) = Eigen::VectorXi::LinSpaced(L, 1, L);
    m.rightCols(k) = table.counts;
    auto header = numbered("cluster", k);
    header.insert(header.begin(), "label");
    write_matrix_csv(root / ("contingency_K" + std::to_string(k) + ".csv"), header, m);
    if (opt.per_k_jaccard)
      write_matrix_csv(root / ("jaccard_K" + std::to_string(k) + ".csv"), numbered("label", L),
                       jac.per_k[k - 1]);
  }
  {
    Eigen::MatrixXd m(opt.k_max, L + 1);
    for (int k = 0; k < opt.k_max; ++k) {
      m(k, 0) = curve.k_values[k];
      m.row(k).tail(L) = curve.max_rate.col(k).transpose();
    }
    auto header = numbered("label", L);
    header.insert(header.begin(), "K");
    write_matrix_csv(root / "max_rate_curve.csv", header, m);
  }
  {
    Eigen::MatrixXd m(L, 2);
    m.col(0) = Eigen::VectorXd::LinSpaced(L, 1, L);
    m.col(1) = auc;
    write_matrix_csv(root / "normalized_auc.csv", {"label", "normalized_auc"}, m);
  }
  write_matrix_csv(root / "jaccard_auc.csv", numbered("label", L), jac.normalized_auc);
  write_json(root / "run-metadata.json",
             {{"command", "stability"},
              {"seed", seed},
              {"config",
               {{"dendrogram", opt.dendrogram.generic_string()},
                {"labels", opt.labels.generic_string()},
                {"k_max", opt.k_max},
                {"jaccard", to_string(opt.jaccard)},
                {"per_k_jaccard", opt.per_k_jaccard}}},
              {"labels", L},
              {"leaves", dendro.leaves},
              {"versions", versions()}});
  dir.commit();
}

}  // namespace mirrorclust::cli
