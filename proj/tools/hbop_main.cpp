#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hbop/errors.hpp"
#include "hbop/harness.hpp"
#include "hbop/image.hpp"
#include "hbop/paths.hpp"

namespace fs = std::filesystem;
using namespace hbop;

namespace {

HarnessConfig resolve_config(const std::string& config_path, int threads) {
  HarnessConfig cfg =
      config_path.empty() ? HarnessConfig{} : HarnessConfig::load(config_path);
  if (threads >= 0) cfg.threads = threads;
  cfg.validate();
  return cfg;
}

int run_ingest(const std::string& manifest_path, const std::string& out_dir,
               const HarnessConfig& cfg) {
  DatasetManifest manifest = DatasetManifest::load(manifest_path);
  fs::create_directories(out_dir);
  int failures = 0;
  for (const ManifestEntry& entry : manifest.entries) {
    ShapeContext ctx = ingest_entry(entry, cfg);
    if (!ctx.ok) {
      ++failures;
      std::cerr << "failed " << entry.id << ": " << ctx.error << "\n";
      continue;
    }
    const std::string out = (fs::path(out_dir) / (entry.id + ".json")).string();
    save_graph_json(ctx.graph, out);
    std::cout << entry.id << " -> " << out << "  (nodes=" << ctx.graph.node_count()
              << " edges=" << ctx.graph.edge_count() << " paths=" << ctx.bag.size()
              << ")\n";
  }
  write_resolved_config(cfg, KernelSelector::New,
                        (fs::path(out_dir) / "ingest").string());
  return failures == 0 ? 0 : 1;
}

int run_gram(const std::string& manifest_path, const std::string& kernel_name,
             const std::string& out_csv, const HarnessConfig& cfg,
             const std::string& dump_models_dir) {
  DatasetManifest manifest = DatasetManifest::load(manifest_path);
  KernelSelector kernel = parse_kernel_selector(kernel_name);
  GramResult gram = compute_gram(manifest, kernel, cfg);
  write_gram_csv(gram, out_csv);
  write_gram_sidecar(gram, cfg, out_csv);
  write_resolved_config(cfg, kernel, out_csv);

  if (!dump_models_dir.empty() &&
      (kernel == KernelSelector::New || kernel == KernelSelector::ChangeClassic)) {
    fs::create_directories(dump_models_dir);
    const PathKernelKind kind = path_kind_of(kernel);
    for (const ManifestEntry& entry : manifest.entries) {
      ShapeContext ctx = ingest_entry(entry, cfg);
      if (!ctx.ok) continue;
      BagProfile profile = profile_bag(ctx.bag, kind, cfg.path_config(), cfg.nu);
      profile.model.config_fingerprint = cfg.fingerprint(kernel);
      std::ofstream out((fs::path(dump_models_dir) / (entry.id + ".model.json")));
      out << model_to_json(profile.model).dump(2) << "\n";
    }
  }

  std::cout << "gram " << gram.ids.size() << "x" << gram.ids.size() << " ("
            << to_string(kernel) << ") -> " << out_csv
            << "\n  eigenvalues in [" << gram.min_eigenvalue << ", "
            << gram.max_eigenvalue << "]"
            << (gram.indefinite_warning ? "  WARNING: indefinite" : "") << "\n";
  for (const auto& f : gram.failed) std::cerr << "failed " << f << "\n";
  return 0;
}

int run_retrieve(const std::string& gram_csv, const std::string& manifest_path,
                 const std::vector<std::string>& classes,
                 const std::string& out_csv, const HarnessConfig& cfg) {
  DatasetManifest manifest = DatasetManifest::load(manifest_path);
  LoadedGram gram = read_gram_csv(gram_csv);

  std::map<std::string, std::string> label_of;
  for (const auto& e : manifest.entries) label_of[e.id] = e.class_label;
  std::vector<std::string> labels;
  for (const auto& id : gram.ids) {
    auto it = label_of.find(id);
    if (it == label_of.end())
      fail(ErrorCode::BadArgument, "gram id not in manifest: " + id);
    labels.push_back(it->second);
  }

  RetrievalReport report =
      retrieval_from_gram(gram.values, gram.ids, labels,
                          classes.empty() ? cfg.classes : classes);
  write_retrieval_csv(report, out_csv);
  write_resolved_config(cfg, KernelSelector::New, out_csv);
  for (const auto& [cls, mean] : report.class_means)
    std::cout << cls << ": mean good matches " << mean << "\n";
  return 0;
}

int run_classify(const std::string& manifest_path, const std::string& kernel_name,
                 const std::string& out_csv, HarnessConfig cfg,
                 int train_per_class) {
  if (train_per_class > 0) cfg.train_per_class = train_per_class;
  DatasetManifest manifest = DatasetManifest::load(manifest_path);
  KernelSelector kernel = parse_kernel_selector(kernel_name);
  ClassificationReport report = run_classification(manifest, kernel, cfg);
  write_classification_csv(report, out_csv);
  write_resolved_config(cfg, kernel, out_csv);
  if (report.rows.empty())
    std::cerr << "no configured class has more than train_per_class shapes; "
                 "set `classes` in the config file\n";
  for (const auto& row : report.rows)
    std::cout << row.class_label << ": recognized " << row.recognized << "/"
              << row.eval_class_size << " (C=" << row.chosen_c
              << (row.feasible ? "" : ", no zero-FP C") << ")\n";
  for (const auto& f : report.failed) std::cerr << "failed " << f << "\n";
  return 0;
}

int run_reduce_demo(const std::string& graph_path, const std::string& path_spec,
                    int D) {
  SkeletalGraph graph = load_graph_json(graph_path);
  SpanningTree tree = max_spanning_tree(graph);

  std::vector<int> node_ids;
  std::stringstream ss(path_spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto strip = [](std::string s) {
      while (!s.empty() && s.front() == ' ') s.erase(s.begin());
      while (!s.empty() && s.back() == ' ') s.pop_back();
      return s;
    };
    const std::string label = strip(token);
    const int v = graph.find_node(label);
    if (v < 0) fail(ErrorCode::BadArgument, "no node labeled " + label);
    node_ids.push_back(v);
  }

  Path path = make_path(tree, node_ids);
  PathHierarchy hierarchy = build_hierarchy(tree, path, D);
  std::cout << hierarchy_to_json(hierarchy).dump(2) << "\n";
  return 0;
}

int run_dump_bag(const std::string& graph_path, int s, int D,
                 const std::string& out_path) {
  SkeletalGraph graph = load_graph_json(graph_path);
  SpanningTree tree = max_spanning_tree(graph);
  BagOfPaths bag = enumerate_bag(tree, s, D);
  nlohmann::json doc = bag_to_json(bag);
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    out << doc.dump(2) << "\n";
    std::cout << "bag with " << bag.size() << " hierarchies -> " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical bag-of-paths shape kernels"};
  app.require_subcommand(1);

  std::string manifest_path, config_path, out_path, kernel_name, gram_path,
      graph_path, path_spec, dump_models_dir;
  std::vector<std::string> classes;
  int threads = -1, train_per_class = -1, D = 2, s = 5;

  auto* ingest = app.add_subcommand("ingest", "masks -> skeletal graph JSON");
  ingest->add_option("--manifest", manifest_path, "dataset manifest csv")->required();
  ingest->add_option("--out", out_path, "output directory")->required();
  ingest->add_option("--config", config_path, "key = value config file");
  ingest->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* gram = app.add_subcommand("gram", "pairwise kernel matrix -> csv");
  gram->add_option("--manifest", manifest_path)->required();
  gram->add_option("--kernel", kernel_name,
                   "max-classic|change-classic|new|matching-classic")
      ->required();
  gram->add_option("--config", config_path);
  gram->add_option("--out", out_path, "output csv")->required();
  gram->add_option("--threads", threads);
  gram->add_option("--dump-models", dump_models_dir,
                   "also write per-shape one-class model JSON here");

  auto* retrieve = app.add_subcommand("retrieve", "good-matches retrieval report");
  retrieve->add_option("--gram", gram_path, "gram csv from the gram subcommand")
      ->required();
  retrieve->add_option("--manifest", manifest_path)->required();
  retrieve->add_option("--classes", classes, "classes to score")->delimiter(',');
  retrieve->add_option("--out", out_path)->required();
  retrieve->add_option("--config", config_path);

  auto* classify = app.add_subcommand("classify", "one-vs-rest zero-FP protocol");
  classify->add_option("--manifest", manifest_path)->required();
  classify->add_option("--kernel", kernel_name)->required();
  classify->add_option("--config", config_path);
  classify->add_option("--train-per-class", train_per_class);
  classify->add_option("--out", out_path)->required();
  classify->add_option("--threads", threads);

  auto* demo = app.add_subcommand("reduce-demo", "print a path hierarchy");
  demo->add_option("--graph", graph_path, "graph JSON")->required();
  demo->add_option("--path", path_spec, "comma separated node ids")->required();
  demo->add_option("--D", D, "max reductions");

  auto* dump = app.add_subcommand("dump-bag", "dump the bag of paths as JSON");
  dump->add_option("--graph", graph_path)->required();
  dump->add_option("--s", s, "max path length");
  dump->add_option("--D", D, "max reductions");
  dump->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return run_ingest(manifest_path, out_path, resolve_config(config_path, threads));
    if (*gram)
      return run_gram(manifest_path, kernel_name, out_path,
                      resolve_config(config_path, threads), dump_models_dir);
    if (*retrieve)
      return run_retrieve(gram_path, manifest_path, classes, out_path,
                          resolve_config(config_path, threads));
    if (*classify)
      return run_classify(manifest_path, kernel_name, out_path,
                          resolve_config(config_path, threads), train_per_class);
    if (*demo) return run_reduce_demo(graph_path, path_spec, D);
    if (*dump) return run_dump_bag(graph_path, s, D, out_path);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
