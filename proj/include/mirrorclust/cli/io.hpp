#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mirrorclust/cluster.hpp"
#include "mirrorclust/netmodel.hpp"
#include "mirrorclust/simlab.hpp"

namespace mirrorclust::cli {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";

/// Edge list: mandatory first line "# n=<n>", then one "u v" pair per line
/// with 0-based ids. Other '#' lines are comments. Self-loops, duplicates and
/// out-of-range ids are rejected with IngestionError naming file and line.
AdjacencySnapshot read_edge_list(const fs::path& path);
void write_edge_list(const fs::path& path, const AdjacencySnapshot& a);

/// Dense n x n 0/1 CSV without header.
AdjacencySnapshot read_dense_csv(const fs::path& path);

struct ManifestNetwork {
  std::string id;
  std::vector<fs::path> snapshots;
  std::optional<int> label;
};

struct DatasetManifest {
  Eigen::Index m = 0;
  Eigen::Index T = 0;
  Eigen::Index n = 0;
  std::vector<ManifestNetwork> networks;
  nlohmann::json generator;
};

/// Snapshot paths in the file are relative to the manifest's directory and
/// are returned resolved.
DatasetManifest read_manifest(const fs::path& path);
/// Writes snapshot paths relative to the manifest's directory.
void write_manifest(const fs::path& path, const DatasetManifest& manifest);

/// Reads one network's snapshots and checks that each has n vertices.
DynamicNetwork load_network(const ManifestNetwork& net, Eigen::Index n, bool dense);
/// Reads every snapshot of every network.
std::vector<DynamicNetwork> load_networks(const DatasetManifest& manifest, bool dense);

/// Writes a matrix as CSV with the given header, 17 significant digits.
void write_matrix_csv(const fs::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& m);
void write_matrix_csv(const fs::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXi& m);

/// Numbered header: prefix1, prefix2, ...
std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count);

nlohmann::json to_json(const Dendrogram& dendro);
Dendrogram dendrogram_from_json(const nlohmann::json& j);
Dendrogram read_dendrogram(const fs::path& path);

nlohmann::json to_json(const ExperimentReport& report);

/// Plot-ready rows x, mean, sd, q05, q95.
void write_curve_csv(const fs::path& path, const ExperimentReport& report);

/// Labels CSV with a header row; the last column is the integer label and
/// rows are in leaf order.
std::vector<int> read_labels(const fs::path& path);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

/// Output directory that only appears under its final name once committed.
/// Files are written under a sibling temporary directory, which is removed
/// if commit() is never reached.
class StagedDirectory {
 public:
  /// Throws std::runtime_error if `target` exists and `replace` is false.
  StagedDirectory(fs::path target, bool replace);
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;
  ~StagedDirectory();

  const fs::path& path() const noexcept { return staging_; }
  void commit();

 private:
  fs::path target_;
  fs::path staging_;
  bool replace_ = false;
  bool committed_ = false;
};

}  // namespace mirrorclust::cli
