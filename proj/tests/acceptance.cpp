// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mirrorclust/cli/commands.hpp"
#include "mirrorclust/cli/io.hpp"
#include "mirrorclust/mirror.hpp"
#include "mirrorclust/numkernel.hpp"
#include "mirrorclust/parallel.hpp"
#include "mirrorclust/seeding.hpp"
#include "mirrorclust/simlab.hpp"
#include "mirrorclust/stability.hpp"
#include "test_support.hpp"

using namespace mirrorclust;
using Eigen::Index;
namespace fs = std::filesystem;
namespace ts = mirrorclust::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

unsigned g_threads = 0;

// 1. Procrustes cost against the 3600-angle x {I, F} grid in d = 2.
Outcome procrustes_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int over = 0;
  bool never_worse = true;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> pairs;
  for (int k = 0; k < 100; ++k) {
    const auto x1 = ts::gaussian_matrix(rng, 6, 2);
    const auto x2 = ts::gaussian_matrix(rng, 6, 2);
    const double cost = procrustes_cost(x1, x2);
    const double grid = ts::brute_force_procrustes_2d(x1, x2);
    worst = std::max(worst, std::abs(cost - grid));
    over += std::abs(cost - grid) > 1e-6;
    never_worse = never_worse && cost <= grid + 1e-12;
    pairs.emplace_back(x1, x2);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Diagnostic only: the grid minimum sits above the true minimum by up to
  // the curvature times the squared half-spacing.
  double refined = 0.0;
  for (const auto& [x1, x2] : pairs)
    refined = std::max(refined, std::abs(procrustes_cost(x1, x2) - ts::refined_procrustes_2d(x1, x2)));
  return {worst <= 1e-6 && never_worse && secs < 5.0,
          "max |cost - grid min| = " + fmt("%.3g", worst) + " (" + std::to_string(over) +
              " of 100 over 1e-6), never above grid: " + (never_worse ? "yes" : "no") +
              ", max gap to refined grid " + fmt("%.3g", refined) + ", " + fmt("%.2f", secs) +
              " s"};
}

// 2. CMDS reproduces exact Euclidean configurations.
Outcome cmds_exactness() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<Index> pick_r(1, 3);
  std::uniform_int_distribution<Index> pick_t(5, 30);
  double worst_dist = 0.0;
  double worst_rel = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index r = pick_r(rng);
    const Index t = pick_t(rng);
    const auto ps = ts::random_point_set(rng, t, r);
    const auto m = cmds(DistanceMatrix(ps.distances), r);
    worst_dist = std::max(worst_dist, (ts::pairwise_distances(m.matrix) - ps.distances).cwiseAbs().maxCoeff());
    const auto truth = ts::centered(ps.points);
    worst_rel = std::max(worst_rel, procrustes_cost(m.matrix, truth) / truth.norm());
  }
  return {worst_dist <= 1e-8 && worst_rel <= 1e-8,
          "max distance error " + fmt("%.3g", worst_dist) + ", max relative Procrustes " +
              fmt("%.3g", worst_rel)};
}

// 3. Per-time orthogonal transforms leave the latent distance matrix unchanged.
Outcome distance_invariance() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<Index> pick_n(5, 60);
  std::uniform_int_distribution<Index> pick_d(1, 4);
  std::uniform_int_distribution<Index> pick_t(2, 15);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = pick_n(rng);
    const Index d = pick_d(rng);
    const Index T = pick_t(rng);
    std::vector<LatentPositions> xs;
    std::vector<LatentPositions> rotated;
    for (Index t = 0; t < T; ++t) {
      const auto x = ts::gaussian_matrix(rng, n, d);
      xs.emplace_back(x);
      rotated.emplace_back(x * ts::random_orthogonal(rng, d));
    }
    const auto a = latent_distance_matrix(xs);
    const auto b = latent_distance_matrix(rotated);
    worst = std::max(worst, (a.matrix() - b.matrix()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "max entrywise difference " + fmt("%.3g", worst)};
}

// Mirror built from eigenvectors of the centered matrix, with signs flipped and
// every tied eigenspace rotated at random.
Mirror injected_mirror(const DistanceMatrix& d, Index r, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(double_center(d));
  const Index T = d.size();
  Eigen::VectorXd vals = es.eigenvalues().reverse();
  Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
  const double tol = 1e-9 * std::abs(vals[0]);
  for (Index i = 0; i < T;) {
    Index j = i + 1;
    while (j < T && std::abs(vals[j] - vals[i]) <= tol) ++j;
    const auto block = ts::random_orthogonal(rng, j - i);
    vecs.middleCols(i, j - i) = vecs.middleCols(i, j - i) * block;
    i = j;
  }
  std::bernoulli_distribution coin(0.5);
  for (Index c = 0; c < r; ++c)
    if (coin(rng) && std::abs(vals[c] - vals[std::min(c + 1, T - 1)]) > tol &&
        (c == 0 || std::abs(vals[c] - vals[c - 1]) > tol))
      vecs.col(c) *= -1.0;
  Mirror m;
  m.eigenvalues = vals.head(r);
  m.matrix = vecs.leftCols(r) * m.eigenvalues.cwiseSqrt().asDiagonal() *
             ts::random_orthogonal(rng, r);
  m.spectrum_tail = vals[r];
  return m;
}

// 4. Mirrors of one distance matrix coincide whatever eigenbasis is chosen.
Outcome mirror_identifiability() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    DistanceMatrix d;
    Index r = 0;
    if (k % 2 == 0) {
      // Regular polygon: the two leading eigenvalues are tied.
      const Index T = 5 + k % 7;
      Eigen::MatrixXd pts(T, 2);
      for (Index t = 0; t < T; ++t) {
        const double a = 2.0 * std::numbers::pi * t / T;
        pts.row(t) << std::cos(a), std::sin(a);
      }
      d = DistanceMatrix(ts::pairwise_distances(pts));
      r = 2;
    } else {
      const Index T = 6 + k % 20;
      r = 1 + k % 3;
      d = DistanceMatrix(ts::random_point_set(rng, T, r + 1).distances);
    }
    std::vector<Mirror> mirrors{cmds(d, r)};
    for (int j = 0; j < 4; ++j) mirrors.push_back(injected_mirror(d, r, rng));
    worst = std::max(worst, mirror_distance_matrix(mirrors).matrix().maxCoeff());
  }
  return {worst <= 1e-8, "max mirror distance " + fmt("%.3g", worst)};
}

double loglog_slope(const ExperimentReport& report) {
  const auto k = static_cast<double>(report.cells.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& c : report.cells) {
    const double x = std::log(c.x);
    const double y = std::log(c.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::string means(const ExperimentReport& report) {
  std::string out;
  for (const auto& c : report.cells)
    out += (out.empty() ? "" : ", ") + fmt("%g", c.x) + ":" + fmt("%.4g", c.mean);
  return out;
}

std::size_t total_failures(const ExperimentReport& report) {
  std::size_t f = 0;
  for (const auto& c : report.cells) f += c.failures;
  return f;
}

// 5. Mirror error decreases in n at roughly the n^-1/2 rate.
Outcome n_sweep() {
  const auto start = std::chrono::steady_clock::now();
  MirrorErrorSetup setup;
  const auto report = run_mirror_error_experiment(setup, 50, 505, g_threads);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool decreasing = true;
  for (std::size_t i = 1; i < report.cells.size(); ++i)
    decreasing = decreasing && report.cells[i].mean < report.cells[i - 1].mean;
  const double slope = loglog_slope(report);
  return {decreasing && slope >= -0.75 && slope <= -0.30 && secs < 600.0 &&
              total_failures(report) == 0,
          std::string(decreasing ? "strictly decreasing" : "not decreasing") + ", slope " +
              fmt("%.3f", slope) + " (band [-0.75, -0.30]); means " + means(report) + "; " +
              fmt("%.0f", secs) + " s"};
}

// 6. Mirror error is roughly flat in T.
Outcome t_sweep() {
  MirrorErrorSetup setup;
  setup.sweep = Sweep::T;
  setup.grid = {20, 30, 40, 50, 70, 100};
  setup.n = 100;
  const auto report = run_mirror_error_experiment(setup, 50, 606, g_threads);
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& c : report.cells) {
    lo = std::min(lo, c.mean);
    hi = std::max(hi, c.mean);
  }
  return {hi / lo <= 2.0 && total_failures(report) == 0,
          "max/min " + fmt("%.3f", hi / lo) + "; means " + means(report)};
}

// 7. Changepoint families are recovered once n is large.
Outcome clustering() {
  const auto start = std::chrono::steady_clock::now();
  ClusteringSetup setup;
  const auto report = run_clustering_experiment(setup, 20, 707, g_threads);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double first = report.cells.front().mean;
  const double last = report.cells.back().mean;
  int inversions = 0;
  for (std::size_t i = 1; i < report.cells.size(); ++i)
    inversions += report.cells[i].mean < report.cells[i - 1].mean;
  return {last >= 0.90 && last - first >= 0.2 && inversions <= 1 && secs < 1800.0 &&
              total_failures(report) == 0,
          "ARI " + means(report) + "; " + std::to_string(inversions) + " inversion(s); " +
              fmt("%.0f", secs) + " s"};
}

// 8. Strict block structure is recovered by every linkage.
Outcome exact_recovery() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> pick_k(2, 6);
  std::uniform_int_distribution<int> pick_size(1, 8);
  int failures = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int K = pick_k(rng);
    std::vector<int> truth;
    for (int c = 1; c <= K; ++c) truth.insert(truth.end(), pick_size(rng), c);
    std::shuffle(truth.begin(), truth.end(), rng);
    const auto m = static_cast<Index>(truth.size());
    // Within in [0, w], between in (w, 2w], with the gap as small as 1e-9 w.
    const double w = 0.5 + uniform01(rng);
    const double gap = std::pow(10.0, -9.0 * uniform01(rng)) * w;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = i + 1; j < m; ++j)
        d(i, j) = d(j, i) = truth[i] == truth[j] ? w * uniform01(rng)
                                                 : w + gap + (w - gap) * uniform01(rng);
    const DistanceMatrix dm(d);
    if (!separation_margin(dm, truth).certified()) {
      ++failures;
      continue;
    }
    for (auto linkage : {Linkage::single, Linkage::complete, Linkage::average})
      failures += adjusted_rand_index(cut(agglomerate(dm, linkage), K).labels(), truth) != 1.0;
  }
  return {failures == 0, std::to_string(failures) + " failures in 600 runs"};
}

Dendrogram fixture_dendrogram(const std::vector<int>& groups, double within, std::mt19937_64& rng) {
  const auto m = static_cast<Index>(groups.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      d(i, j) = d(j, i) =
          groups[i] == groups[j] ? within * uniform01(rng) : 1.0 + uniform01(rng);
  return agglomerate(DistanceMatrix(d));
}

// 9. Stability envelope on a 13 x 11 fixture.
Outcome stability_envelope() {
  std::mt19937_64 rng(909);
  constexpr int L = 13;
  constexpr int R = 11;
  std::vector<int> labels;
  for (int l = 1; l <= L; ++l) labels.insert(labels.end(), R, l);
  std::shuffle(labels.begin(), labels.end(), rng);

  // Separated: every label is its own tight group.
  const auto sep = fixture_dendrogram(labels, 0.1, rng);
  const double min_auc = normalized_auc(max_frequency_curve(sep, labels, L)).minCoeff();

  // Spread: K tight groups each holding one replicate of every label, so a
  // cut at K places each label evenly over all clusters.
  double spread_err = 0.0;
  for (int k = 1; k <= L; ++k) {
    std::vector<int> groups;
    std::vector<int> spread_labels;
    for (int g = 0; g < k; ++g)
      for (int l = 1; l <= R; ++l) {
        groups.push_back(g);
        spread_labels.push_back(l);
      }
    const auto dendro = fixture_dendrogram(groups, 0.1, rng);
    const auto curve = max_frequency_curve(dendro, spread_labels, k);
    spread_err = std::max(spread_err, (curve.max_rate.col(k - 1).array() - 1.0 / k).abs().maxCoeff());
  }

  // Noisy: unstructured distances, envelope and Jaccard properties only.
  const auto noisy = fixture_dendrogram(std::vector<int>(L * R, 0), 1.0, rng);
  const auto curve = max_frequency_curve(noisy, labels, L);
  bool envelope = true;
  for (int k = 1; k <= L; ++k)
    envelope = envelope && (curve.max_rate.col(k - 1).array() >= 1.0 / k - 1e-15).all() &&
               (curve.max_rate.col(k - 1).array() <= 1.0).all();
  bool jaccard = true;
  for (auto variant : {JaccardVariant::weighted, JaccardVariant::support}) {
    auto sweep = jaccard_label_sweep(noisy, labels, L, variant);
    sweep.per_k.push_back(sweep.normalized_auc);
    for (const auto& j : sweep.per_k)
      jaccard = jaccard && j == j.transpose() && j.diagonal().isZero(0.0) && j.minCoeff() >= 0.0 &&
                j.maxCoeff() <= 1.0;
  }
  return {min_auc == 1.0 && spread_err <= 1e-15 && envelope && jaccard,
          "min separated AUC " + fmt("%.17g", min_auc) + ", max |rate - 1/K| on spread cuts " +
              fmt("%.3g", spread_err) + ", envelope " + (envelope ? "ok" : "violated") +
              ", jaccard " + (jaccard ? "ok" : "violated")};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every artifact under `root`; the thread count echoed in run-metadata.json
// is dropped so runs with different worker counts can be compared.
std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel == "run-metadata.json") {
      auto j = cli::read_json(e.path());
      j.erase("threads");
      out[rel] = j.dump();
    } else {
      out[rel] = read_text(e.path());
    }
  }
  return out;
}

// 10. Same seed, threads 1 and 8: byte-identical artifacts.
Outcome determinism() {
  const auto root = fs::temp_directory_path() / ("mirrorclust-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::vector<std::string> broken;

  cli::GenerateOptions gen;
  gen.scenario = "changepoint";
  gen.n = 80;
  gen.T = 20;
  gen.change_t = 10;
  gen.per_cluster = 6;
  gen.seed = 1010;
  gen.out = root / "data";
  const auto manifest = cli::cmd_generate(gen);

  const auto compare = [&](const std::string& what, const std::function<void(unsigned, fs::path)>& run) {
    std::vector<std::map<std::string, std::string>> results;
    int idx = 0;
    for (unsigned threads : {1u, 8u, 1u, 8u}) {
      const auto out = root / (what + std::to_string(idx++));
      run(threads, out);
      results.push_back(artifacts(out));
    }
    for (const auto& r : results)
      if (r != results.front() || r.empty()) {
        broken.push_back(what);
        break;
      }
  };

  compare("cluster", [&](unsigned threads, fs::path out) {
    cli::ClusterOptions c;
    c.manifest = manifest;
    c.out = out;
    c.seed = 1010;
    c.threads = threads;
    cli::cmd_cluster(c);
  });
  compare("mirror-error", [&](unsigned threads, fs::path out) {
    cli::ExperimentOptions e;
    e.name = "mirror-error";
    e.replicates = 3;
    e.seed = 1011;
    e.threads = threads;
    e.out = out;
    cli::cmd_experiment(e);
  });
  compare("clustering", [&](unsigned threads, fs::path out) {
    cli::ExperimentOptions e;
    e.name = "clustering";
    e.replicates = 2;
    e.seed = 1012;
    e.threads = threads;
    e.out = out;
    cli::cmd_experiment(e);
  });
  fs::remove_all(root);
  std::string detail = "cluster, mirror-error and clustering compared over 4 runs";
  if (!broken.empty()) {
    detail = "differs:";
    for (const auto& b : broken) detail += " " + b;
  }
  return {broken.empty(), detail};
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  if (const char* env = std::getenv("MIRRORCLUST_THREADS"))
    g_threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Procrustes matches the rotation/reflection grid", procrustes_oracle},
      {"CMDS reproduces realizable distances", cmds_exactness},
      {"latent distances are invariant to per-time rotations", distance_invariance},
      {"mirrors agree under eigenbasis injection", mirror_identifiability},
      {"mirror error n-sweep", n_sweep},
      {"mirror error T-sweep", t_sweep},
      {"clustering ARI sweep", clustering},
      {"exact recovery on block distances", exact_recovery},
      {"stability envelope on a 13 x 11 fixture", stability_envelope},
      {"determinism across runs and thread counts", determinism},
  };
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const auto n = std::strtoul(argv[a], nullptr, 10);
    if (n < 1 || n > criteria.size()) {
      std::fprintf(stderr, "no criterion %s\n", argv[a]);
      return 2;
    }
    selected[n - 1] = true;
  }
  int failed = 0;
  int ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++ran;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria failed\n", failed, ran);
  return failed == 0 ? 0 : 1;
}
