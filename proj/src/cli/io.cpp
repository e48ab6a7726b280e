#include "mirrorclust/cli/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unistd.h>

#include "mirrorclust/errors.hpp"

namespace mirrorclust::cli {

using Eigen::Index;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw IngestionError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string() + ": cannot open for writing");
  out << std::setprecision(17);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_int(std::string_view s, long long& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

AdjacencySnapshot checked_snapshot(const fs::path& path, Eigen::MatrixXd a) {
  try {
    return AdjacencySnapshot(std::move(a));
  } catch (const std::exception& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

Index json_index(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw IngestionError(path.string() + ": missing integer field \"" + key + "\"");
  return j[key].get<Index>();
}

template <class Matrix>
void write_csv(const fs::path& path, const std::vector<std::string>& header, const Matrix& m) {
  if (static_cast<Index>(header.size()) != m.cols())
    throw ShapeError("header has " + std::to_string(header.size()) + " columns, matrix has " +
                     std::to_string(m.cols()));
  auto out = open_output(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

}  // namespace

AdjacencySnapshot read_edge_list(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "empty file, expected \"# n=<n>\"");
  long long n = 0;
  {
    auto head = trim(line);
    constexpr std::string_view prefix = "# n=";
    if (!head.starts_with(prefix) || !parse_int(trim(head.substr(prefix.size())), n) || n < 1)
      fail(path, 1, "first line must be \"# n=<n>\" with n >= 1");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto parts = tokens(t);
    long long u = 0;
    long long v = 0;
    if (parts.size() != 2 || !parse_int(parts[0], u) || !parse_int(parts[1], v))
      fail(path, lineno, "expected \"u v\"");
    if (u < 0 || v < 0 || u >= n || v >= n)
      fail(path, lineno, "vertex id out of range [0, " + std::to_string(n) + ")");
    if (u == v) fail(path, lineno, "self-loop on vertex " + std::to_string(u));
    if (a(u, v) != 0.0)
      fail(path, lineno, "duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    a(u, v) = a(v, u) = 1.0;
  }
  return checked_snapshot(path, std::move(a));
}

void write_edge_list(const fs::path& path, const AdjacencySnapshot& a) {
  auto out = open_output(path);
  out << "# n=" << a.n() << '\n';
  const auto& m = a.matrix();
  for (Index j = 1; j < a.n(); ++j)
    for (Index i = 0; i < j; ++i)
      if (m(i, j) != 0.0) out << i << ' ' << j << '\n';
}

AdjacencySnapshot read_dense_csv(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (auto cell : split(line, ',')) {
      long long v = 0;
      if (!parse_int(cell, v) || (v != 0 && v != 1)) fail(path, lineno, "entries must be 0 or 1");
      row.push_back(static_cast<double>(v));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, lineno, "row has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, 1, "empty matrix");
  const auto n = static_cast<Index>(rows.size());
  if (static_cast<Index>(rows.front().size()) != n)
    fail(path, lineno, "matrix is " + std::to_string(n) + " x " +
                           std::to_string(rows.front().size()) + ", expected square");
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rows[i][j];
  return checked_snapshot(path, std::move(a));
}

DatasetManifest read_manifest(const fs::path& path) {
  const auto j = read_json(path);
  const auto base = path.parent_path();
  DatasetManifest m;
  m.m = json_index(j, "m", path);
  m.T = json_index(j, "T", path);
  m.n = json_index(j, "n", path);
  if (j.contains("generator")) m.generator = j["generator"];
  if (!j.contains("networks") || !j["networks"].is_array())
    throw IngestionError(path.string() + ": missing array field \"networks\"");
  std::set<std::string> ids;
  for (const auto& jn : j["networks"]) {
    ManifestNetwork net;
    if (!jn.contains("id") || !jn["id"].is_string())
      throw IngestionError(path.string() + ": network without string \"id\"");
    net.id = jn["id"].get<std::string>();
    if (!ids.insert(net.id).second)
      throw IngestionError(path.string() + ": duplicate network id \"" + net.id + "\"");
    if (!jn.contains("snapshots") || !jn["snapshots"].is_array())
      throw IngestionError(path.string() + ": network \"" + net.id + "\" has no snapshot list");
    for (const auto& s : jn["snapshots"]) {
      if (!s.is_string())
        throw IngestionError(path.string() + ": network \"" + net.id +
                             "\" has a non-string snapshot path");
      net.snapshots.push_back(base / s.get<std::string>());
    }
    if (jn.contains("label")) {
      if (!jn["label"].is_number_integer())
        throw IngestionError(path.string() + ": network \"" + net.id + "\" label is not an integer");
      net.label = jn["label"].get<int>();
    }
    m.networks.push_back(std::move(net));
  }
  if (static_cast<Index>(m.networks.size()) != m.m)
    throw IngestionError(path.string() + ": m = " + std::to_string(m.m) + " but " +
                         std::to_string(m.networks.size()) + " networks listed");
  for (const auto& net : m.networks)
    if (static_cast<Index>(net.snapshots.size()) != m.T)
      throw IngestionError(path.string() + ": network \"" + net.id + "\" has " +
                           std::to_string(net.snapshots.size()) + " snapshots, T = " +
                           std::to_string(m.T));
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  const auto base = path.parent_path();
  json nets = json::array();
  for (const auto& net : manifest.networks) {
    json jn{{"id", net.id}};
    if (net.label) jn["label"] = *net.label;
    json snaps = json::array();
    for (const auto& s : net.snapshots) snaps.push_back(s.lexically_relative(base).generic_string());
    jn["snapshots"] = std::move(snaps);
    nets.push_back(std::move(jn));
  }
  json j{{"m", manifest.m}, {"T", manifest.T}, {"n", manifest.n}, {"networks", std::move(nets)}};
  if (!manifest.generator.is_null()) j["generator"] = manifest.generator;
  write_json(path, j);
}

DynamicNetwork load_network(const ManifestNetwork& net, Index n, bool dense) {
  DynamicNetwork dn{net.id, {}};
  for (const auto& path : net.snapshots) {
    auto a = dense ? read_dense_csv(path) : read_edge_list(path);
    if (a.n() != n)
      throw IngestionError(path.string() + ": snapshot has n = " + std::to_string(a.n()) +
                           ", manifest declares n = " + std::to_string(n));
    dn.snapshots.push_back(std::move(a));
  }
  return dn;
}

std::vector<DynamicNetwork> load_networks(const DatasetManifest& manifest, bool dense) {
  std::vector<DynamicNetwork> out;
  out.reserve(manifest.networks.size());
  for (const auto& net : manifest.networks) out.push_back(load_network(net, manifest.n, dense));
  return out;
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& m) {
  write_csv(path, header, m);
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXi& m) {
  write_csv(path, header, m);
}

std::vector<std::string> numbered(const std::string& prefix, Index count) {
  std::vector<std::string> out;
  for (Index i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

json to_json(const Dendrogram& dendro) {
  json merges = json::array();
  for (const auto& mg : dendro.merges)
    merges.push_back({{"a", mg.a}, {"b", mg.b}, {"height", mg.height}, {"new_id", mg.new_id}});
  return {{"leaves", dendro.leaves}, {"merges", std::move(merges)}};
}

Dendrogram dendrogram_from_json(const json& j) {
  Dendrogram d;
  d.leaves = j.at("leaves").get<int>();
  for (const auto& jm : j.at("merges"))
    d.merges.push_back({jm.at("a").get<int>(), jm.at("b").get<int>(),
                        jm.at("height").get<double>(), jm.at("new_id").get<int>()});
  if (d.leaves < 1 || static_cast<int>(d.merges.size()) != d.leaves - 1)
    throw ShapeError("dendrogram with " + std::to_string(d.leaves) + " leaves has " +
                     std::to_string(d.merges.size()) + " merges");
  std::vector<bool> used(2 * d.leaves - 1, false);
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const auto& mg = d.merges[k];
    const int id = d.leaves + static_cast<int>(k);
    if (mg.new_id != id || mg.a < 0 || mg.b < 0 || mg.a >= id || mg.b >= id || mg.a == mg.b ||
        used[mg.a] || used[mg.b])
      throw ShapeError("dendrogram merge " + std::to_string(k) + " is inconsistent");
    used[mg.a] = used[mg.b] = true;
  }
  return d;
}

Dendrogram read_dendrogram(const fs::path& path) {
  const auto j = read_json(path);
  try {
    return dendrogram_from_json(j);
  } catch (const json::exception& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

json to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells)
    cells.push_back({{"x", c.x},
                     {"replicates", c.replicates},
                     {"failures", c.failures},
                     {"mean", c.mean},
                     {"sd", c.sd},
                     {"q05", c.q05},
                     {"q95", c.q95},
                     {"values", c.values}});
  return {{"name", report.name},         {"statistic", report.statistic},
          {"grid_label", report.grid_label}, {"seed", report.seed},
          {"replicates", report.replicates}, {"cells", std::move(cells)}};
}

void write_curve_csv(const fs::path& path, const ExperimentReport& report) {
  Eigen::MatrixXd m(static_cast<Index>(report.cells.size()), 5);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto& c = report.cells[i];
    m.row(i) << c.x, c.mean, c.sd, c.q05, c.q95;
  }
  write_csv(path, {"x", "mean", "sd", "q05", "q95"}, m);
}

std::vector<int> read_labels(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<int> labels;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    long long v = 0;
    if (!parse_int(cells.back(), v)) fail(path, lineno, "label is not an integer");
    labels.push_back(static_cast<int>(v));
  }
  if (labels.empty()) fail(path, lineno, "no labels");
  return labels;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

StagedDirectory::StagedDirectory(fs::path target, bool replace)
    : target_(std::move(target)), replace_(replace) {
  if (target_.filename().empty()) target_ = target_.parent_path();
  if (fs::exists(target_) && !replace_)
    throw IngestionError(target_.string() + " already exists (use --force to replace it)");
  const auto parent = target_.parent_path().empty() ? fs::path(".") : target_.parent_path();
  fs::create_directories(parent);
  staging_ = parent / ("." + target_.filename().string() + ".partial-" + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directory(staging_);
}

StagedDirectory::~StagedDirectory() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagedDirectory::commit() {
  if (fs::exists(target_)) {
    if (!replace_) throw IngestionError(target_.string() + " appeared while writing");
    fs::remove_all(target_);
  }
  fs::rename(staging_, target_);
  committed_ = true;
}

}  // namespace mirrorclust::cli
