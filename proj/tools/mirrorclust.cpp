#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mirrorclust/cli/commands.hpp"
#include "mirrorclust/cli/io.hpp"
#include "mirrorclust/errors.hpp"
#include "mirrorclust/parallel.hpp"

namespace mc = mirrorclust;
namespace cli = mirrorclust::cli;

namespace {

// "auto" and 0 both mean one worker per hardware thread.
unsigned parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  std::size_t pos = 0;
  long v = -1;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
  }
  if (pos != text.size() || v < 0)
    throw cli::UsageError("threads must be a positive integer or \"auto\", got \"" + text + "\"");
  return static_cast<unsigned>(v);
}

std::string threads_default() {
  const char* env = std::getenv("MIRRORCLUST_THREADS");
  return env && *env ? env : "auto";
}

const CLI::IsMember kLinkages({"single", "complete", "average"});

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster dynamic networks by the Procrustes distance between their mirrors"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  std::string threads = threads_default();

  cli::ClusterOptions cluster;
  std::string d_text = "1";
  auto* cl = app.add_subcommand("cluster", "Run the clustering pipeline on a dataset manifest");
  cl->add_option("manifest", cluster.manifest, "Dataset manifest JSON")->required();
  cl->add_option("--out", cluster.out, "Output directory")->required();
  cl->add_option("--d", d_text, "Embedding dimension, or \"auto\" for the elbow rule");
  cl->add_option("--dim-rule", cluster.dim_rule, "fixed or elbow")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mc::DimRule>{{"fixed", mc::DimRule::fixed},
                                             {"elbow", mc::DimRule::elbow}}));
  cl->add_option("--max-rank", cluster.max_rank, "Largest dimension the elbow rule considers");
  cl->add_option("--r", cluster.r, "Mirror dimension");
  cl->add_option("--k", cluster.k, "Number of clusters");
  std::string cluster_linkage = "average";
  cl->add_option("--linkage", cluster_linkage, "single, complete or average")
      ->check(kLinkages);
  cl->add_option("--seed", cluster.seed, "Recorded in every artifact");
  cl->add_option("--threads", threads, "Worker threads or \"auto\" (env MIRRORCLUST_THREADS)");
  cl->add_flag("--dense", cluster.dense, "Snapshots are dense 0/1 CSV matrices");
  cl->add_flag("--force", cluster.force, "Replace an existing output directory");

  cli::GenerateOptions gen;
  auto* ge = app.add_subcommand("generate", "Write a synthetic dataset and its manifest");
  ge->add_option("scenario", gen.scenario, "rw or changepoint")->required();
  ge->add_option("--out", gen.out, "Output directory")->required();
  ge->add_option("--seed", gen.seed);
  ge->add_option("--threads", threads);
  ge->add_flag("--force", gen.force);
  ge->add_option("--n", gen.n, "Vertices");
  ge->add_option("--T", gen.T, "Time points (rw 10, changepoint 50)");
  ge->add_option("--c-tilde", gen.c_tilde, "Walk start value");
  ge->add_option("--delta", gen.delta, "rw step size (default (1 - c_tilde) / T)");
  ge->add_option("--p", gen.p, "rw step probability");
  ge->add_option("--networks", gen.networks, "rw network count");
  ge->add_option("--per-cluster", gen.per_cluster, "changepoint networks per family");
  ge->add_option("--change-t", gen.change_t, "changepoint switch time");
  ge->add_option("--p-before", gen.p_before, "Family 1 step probability before the switch");
  ge->add_option("--p-after", gen.p_after, "Family 1 step probability after the switch");

  cli::ExperimentOptions exp;
  auto* ex = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  ex->add_option("name", exp.name, "mirror-error or clustering")->required();
  ex->add_option("--out", exp.out, "Output directory")->required();
  ex->add_option("--seed", exp.seed);
  ex->add_option("--threads", threads);
  ex->add_flag("--force", exp.force);
  ex->add_option("--replicates", exp.replicates);
  ex->add_option("--sweep", exp.sweep, "mirror-error: n or T")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mc::Sweep>{{"n", mc::Sweep::n}, {"T", mc::Sweep::T}}));
  ex->add_option("--grid", exp.grid, "Swept values")->delimiter(',');
  ex->add_option("--n", exp.n, "mirror-error: fixed n for a T sweep");
  ex->add_option("--T", exp.T, "Fixed T");
  ex->add_option("--d", exp.d);
  ex->add_option("--r", exp.r);
  ex->add_option("--c-tilde", exp.c_tilde);
  ex->add_option("--p", exp.p, "mirror-error: step probability");
  ex->add_option("--per-cluster", exp.per_cluster, "clustering: networks per family");
  ex->add_option("--change-t", exp.change_t, "clustering: switch time");
  std::string exp_linkage = "average";
  ex->add_option("--linkage", exp_linkage)->check(kLinkages);

  cli::StabilityOptions stab;
  auto* st = app.add_subcommand("stability", "Label stability across dendrogram cuts");
  st->add_option("dendrogram", stab.dendrogram, "dendrogram.json from cluster")->required();
  st->add_option("labels", stab.labels, "CSV with a header; last column is the label")
      ->required();
  st->add_option("--out", stab.out, "Output directory")->required();
  st->add_option("--k-max", stab.k_max, "Largest number of clusters");
  st->add_option("--jaccard", stab.jaccard, "weighted or support")
      ->transform(CLI::CheckedTransformer(std::map<std::string, mc::JaccardVariant>{
          {"weighted", mc::JaccardVariant::weighted}, {"support", mc::JaccardVariant::support}}));
  st->add_flag("--per-k", stab.per_k_jaccard, "Also write jaccard_K<k>.csv");
  st->add_flag("--force", stab.force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const unsigned workers = parse_threads(threads);
    if (*cl) {
      if (d_text == "auto") {
        cluster.dim_rule = mc::DimRule::elbow;
      } else {
        try {
          cluster.d = std::stol(d_text);
        } catch (const std::exception&) {
          throw cli::UsageError("--d must be a positive integer or \"auto\"");
        }
      }
      cluster.linkage = mc::parse_linkage(cluster_linkage);
      cluster.threads = workers;
      const auto s = cli::cmd_cluster(cluster);
      std::cout << "clustered " << s.ids.size() << " networks into " << cluster.k
                << " clusters (d = " << s.d << ")";
      if (s.ari_vs_planted) std::cout << ", ARI vs planted labels " << *s.ari_vs_planted;
      std::cout << "\n";
    } else if (*ge) {
      gen.threads = workers;
      const auto manifest = cli::cmd_generate(gen);
      std::cout << "wrote " << manifest.string() << "\n";
    } else if (*ex) {
      exp.linkage = mc::parse_linkage(exp_linkage);
      exp.threads = workers;
      const auto report = cli::cmd_experiment(exp);
      for (const auto& c : report.cells)
        std::cout << report.grid_label << " = " << c.x << ": mean " << c.mean << " sd " << c.sd
                  << " (" << c.failures << " failed)\n";
    } else if (*st) {
      cli::cmd_stability(stab);
      std::cout << "wrote " << stab.out.string() << "\n";
    }
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
