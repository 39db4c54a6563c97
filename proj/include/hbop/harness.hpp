#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbop/bag_kernels.hpp"
#include "hbop/graph.hpp"
#include "hbop/matrix.hpp"
#include "hbop/paths.hpp"

namespace hbop {

enum class KernelSelector { MaxClassic, ChangeClassic, New, MatchingClassic };

KernelSelector parse_kernel_selector(const std::string& name);
const char* to_string(KernelSelector k);
PathKernelKind path_kind_of(KernelSelector k);

struct HarnessConfig {
  int s = 5;
  int D = 2;
  double sigma_vertex = 0.1;
  double sigma_edge = 0.1;
  double nu = 0.9;
  double sigma_change_new = 0.3;
  double sigma_change_classic = 1.0;
  double sigma_matching = 1.0;
  int threads = 1;  // 0 = hardware concurrency
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<std::string> classes = {"hands", "tools", "dudes"};
  int train_per_class = 5;

  PathKernelConfig path_config() const;
  double sigma_change_for(KernelSelector k) const;
  void validate() const;

  /// Flat key = value file; unknown keys are rejected.
  static HarnessConfig load(const std::string& file_path);
  nlohmann::json resolved() const;
  std::uint64_t fingerprint(KernelSelector k) const;
};

struct ManifestEntry {
  std::string id;
  std::string path;  // mask bitmap or graph JSON, resolved against the manifest dir
  std::string class_label;
};

struct DatasetManifest {
  std::string name;
  std::vector<ManifestEntry> entries;

  static DatasetManifest load(const std::string& file_path);
  std::vector<std::string> class_order() const;  // first-appearance order
  std::vector<int> indices_of_class(const std::string& label) const;
};

/// One shape spun up for kernel evaluation. Failed ingestion keeps the run
/// alive; the failure lands in the reports.
struct ShapeContext {
  ManifestEntry entry;
  bool ok = false;
  std::string error;
  SkeletalGraph graph;
  SpanningTree tree;
  BagOfPaths bag;
  BagProfile profile;
};

/// Mask file or graph JSON -> graph/tree/bag. Does not fit the profile.
ShapeContext ingest_entry(const ManifestEntry& entry, const HarnessConfig& config);

struct GramResult {
  KernelSelector kernel = KernelSelector::New;
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  Matrix values;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool indefinite_warning = false;  // min eigenvalue < -1e-6
  std::vector<std::string> failed;  // "id: reason"
  std::uint64_t config_fingerprint = 0;
};

GramResult compute_gram(const DatasetManifest& manifest, KernelSelector kernel,
                        const HarnessConfig& config);

void write_gram_csv(const GramResult& gram, const std::string& file_path);
void write_gram_sidecar(const GramResult& gram, const HarnessConfig& config,
                        const std::string& csv_path);

struct LoadedGram {
  std::vector<std::string> ids;
  Matrix values;
};
LoadedGram read_gram_csv(const std::string& file_path);

/// Kernel-induced distance sqrt(max(0, k(x,x) + k(x',x') - 2 k(x,x'))); the
/// clamp covers indefinite kernels going slightly negative.
double kernel_distance(double k_xx, double k_yy, double k_xy);

/// Number of shapes ranked before the first different-class shape, query
/// included. Ties order by shape id.
int good_matches(const std::vector<double>& distance_row,
                 const std::vector<std::string>& ids,
                 const std::vector<std::string>& labels,
                 const std::string& query_class);

struct RetrievalRow {
  std::string id;
  std::string class_label;
  int good_matches = 0;
};

struct RetrievalReport {
  std::vector<RetrievalRow> rows;        // one per shape of the scored classes
  std::vector<std::pair<std::string, double>> class_means;
  std::uint64_t config_fingerprint = 0;
  std::string kernel;
  std::vector<std::string> failed;
};

RetrievalReport retrieval_from_gram(const Matrix& gram,
                                    const std::vector<std::string>& ids,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& classes);

RetrievalReport run_retrieval(const DatasetManifest& manifest,
                              KernelSelector kernel, const HarnessConfig& config);

void write_retrieval_csv(const RetrievalReport& report, const std::string& file_path);

struct ClassificationRow {
  std::string class_label;
  int train_positives = 0;
  int eval_class_size = 0;
  int recognized = 0;       // true positives on the evaluation shapes
  int false_positives = 0;
  double chosen_c = 0.0;
  bool feasible = true;     // a zero-false-positive C existed
};

struct ClassificationReport {
  std::vector<ClassificationRow> rows;
  bool indefinite_kernel = false;
  std::uint64_t config_fingerprint = 0;
  std::string kernel;
  std::vector<std::string> failed;
};

ClassificationReport run_classification(const DatasetManifest& manifest,
                                        KernelSelector kernel,
                                        const HarnessConfig& config);

void write_classification_csv(const ClassificationReport& report,
                              const std::string& file_path);

/// Resolved-config JSON written next to every output file.
void write_resolved_config(const HarnessConfig& config, KernelSelector kernel,
                           const std::string& out_path);

}  // namespace hbop
