#include "hbop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "hbop/errors.hpp"
#include "hbop/image.hpp"
#include "hbop/svm.hpp"

namespace hbop {

namespace fs = std::filesystem;

KernelSelector parse_kernel_selector(const std::string& name) {
  if (name == "max-classic") return KernelSelector::MaxClassic;
  if (name == "change-classic") return KernelSelector::ChangeClassic;
  if (name == "new") return KernelSelector::New;
  if (name == "matching-classic") return KernelSelector::MatchingClassic;
  fail(ErrorCode::BadArgument, "unknown kernel selector: " + name);
}

const char* to_string(KernelSelector k) {
  switch (k) {
    case KernelSelector::MaxClassic: return "max-classic";
    case KernelSelector::ChangeClassic: return "change-classic";
    case KernelSelector::New: return "new";
    case KernelSelector::MatchingClassic: return "matching-classic";
  }
  return "?";
}

PathKernelKind path_kind_of(KernelSelector k) {
  return k == KernelSelector::New ? PathKernelKind::Edit : PathKernelKind::Classic;
}

PathKernelConfig HarnessConfig::path_config() const {
  return {sigma_vertex, sigma_edge, D};
}

double HarnessConfig::sigma_change_for(KernelSelector k) const {
  return k == KernelSelector::New ? sigma_change_new : sigma_change_classic;
}

void HarnessConfig::validate() const {
  path_config().validate();
  if (s < 1) fail(ErrorCode::BadArgument, "s must be >= 1");
  if (nu <= 0.0 || nu > 1.0) fail(ErrorCode::BadArgument, "nu must be in (0, 1]");
  if (sigma_change_new <= 0.0 || sigma_change_classic <= 0.0 ||
      sigma_matching <= 0.0)
    fail(ErrorCode::BadArgument, "bandwidths must be positive");
  if (threads < 0) fail(ErrorCode::BadArgument, "threads must be >= 0");
  if (train_per_class < 1)
    fail(ErrorCode::BadArgument, "train_per_class must be >= 1");
  if (c_grid.empty()) fail(ErrorCode::BadArgument, "c_grid must not be empty");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

}  // namespace

HarnessConfig HarnessConfig::load(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open config " + file_path);
  HarnessConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::BadFormat,
           file_path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "s") cfg.s = std::stoi(value);
      else if (key == "D") cfg.D = std::stoi(value);
      else if (key == "sigma_vertex") cfg.sigma_vertex = std::stod(value);
      else if (key == "sigma_edge") cfg.sigma_edge = std::stod(value);
      else if (key == "nu") cfg.nu = std::stod(value);
      else if (key == "sigma_change_new") cfg.sigma_change_new = std::stod(value);
      else if (key == "sigma_change_classic") cfg.sigma_change_classic = std::stod(value);
      else if (key == "sigma_matching") cfg.sigma_matching = std::stod(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "train_per_class") cfg.train_per_class = std::stoi(value);
      else if (key == "classes") cfg.classes = split(value, ',');
      else if (key == "c_grid") {
        cfg.c_grid.clear();
        for (const std::string& v : split(value, ',')) cfg.c_grid.push_back(std::stod(v));
      } else {
        fail(ErrorCode::BadFormat,
             file_path + ":" + std::to_string(lineno) + ": unknown key " + key);
      }
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::BadFormat,
           file_path + ":" + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

nlohmann::json HarnessConfig::resolved() const {
  return {{"s", s},
          {"D", D},
          {"sigma_vertex", sigma_vertex},
          {"sigma_edge", sigma_edge},
          {"nu", nu},
          {"sigma_change_new", sigma_change_new},
          {"sigma_change_classic", sigma_change_classic},
          {"sigma_matching", sigma_matching},
          {"threads", threads},
          {"c_grid", c_grid},
          {"classes", classes},
          {"train_per_class", train_per_class}};
}

std::uint64_t HarnessConfig::fingerprint(KernelSelector k) const {
  // FNV-1a over the canonical config dump plus the kernel selector.
  std::string payload = resolved().dump() + "|" + to_string(k);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

DatasetManifest DatasetManifest::load(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open manifest " + file_path);
  DatasetManifest manifest;
  manifest.name = fs::path(file_path).stem().string();
  const fs::path base = fs::path(file_path).parent_path();

  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> parts = split(t, ',');
    if (parts.size() != 3)
      fail(ErrorCode::BadFormat, file_path + ":" + std::to_string(lineno) +
                                     ": expected id,path,class");
    if (parts[0] == "id" && parts[2] == "class") continue;  // header row
    if (!seen.insert(parts[0]).second)
      fail(ErrorCode::BadFormat, "duplicate shape id " + parts[0]);
    fs::path p(parts[1]);
    if (p.is_relative()) p = base / p;
    manifest.entries.push_back({parts[0], p.string(), parts[2]});
  }
  if (manifest.entries.empty())
    fail(ErrorCode::BadFormat, "manifest has no entries: " + file_path);
  return manifest;
}

std::vector<std::string> DatasetManifest::class_order() const {
  std::vector<std::string> order;
  for (const auto& e : entries)
    if (std::find(order.begin(), order.end(), e.class_label) == order.end())
      order.push_back(e.class_label);
  return order;
}

std::vector<int> DatasetManifest::indices_of_class(const std::string& label) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].class_label == label) out.push_back(static_cast<int>(i));
  return out;
}

ShapeContext ingest_entry(const ManifestEntry& entry, const HarnessConfig& config) {
  ShapeContext ctx;
  ctx.entry = entry;
  try {
    const bool is_graph = fs::path(entry.path).extension() == ".json";
    if (is_graph) {
      ctx.graph = load_graph_json(entry.path);
    } else {
      ShapeImage shape = load_mask(entry.path);
      shape.id = entry.id;
      shape.class_label = entry.class_label;
      Skeleton skeleton = skeletonize(shape);
      ctx.graph = build_graph(skeleton, shape);
    }
    ctx.graph.shape_id = entry.id;
    ctx.graph.class_label = entry.class_label;
    ctx.tree = max_spanning_tree(ctx.graph);
    ctx.bag = enumerate_bag(ctx.tree, config.s, config.D, entry.id);
    if (ctx.bag.size() == 0)
      fail(ErrorCode::EmptyBag, "no paths (degenerate skeleton)");
    ctx.ok = true;
  } catch (const Error& e) {
    ctx.ok = false;
    ctx.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return ctx;
}

namespace {

// Runs fn(i) for i in [0, n) over the requested worker count. Results must be
// written to disjoint slots so any schedule yields identical output.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::thread::hardware_concurrency()
                                  : static_cast<unsigned>(threads);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

double pair_kernel(const ShapeContext& a, const ShapeContext& b,
                   KernelSelector kernel, const HarnessConfig& config) {
  const PathKernelKind kind = path_kind_of(kernel);
  const PathKernelConfig pk = config.path_config();
  switch (kernel) {
    case KernelSelector::MaxClassic:
      return k_max(a.bag, b.bag, kind, pk);
    case KernelSelector::MatchingClassic:
      return k_matching(a.bag, b.bag, kind, pk, config.sigma_matching);
    case KernelSelector::ChangeClassic:
    case KernelSelector::New:
      return k_change(a.bag, a.profile, b.bag, b.profile, kind, pk,
                      config.sigma_change_for(kernel));
  }
  fail(ErrorCode::BadArgument, "unhandled kernel selector");
}

}  // namespace

GramResult compute_gram(const DatasetManifest& manifest, KernelSelector kernel,
                        const HarnessConfig& config) {
  config.validate();
  GramResult result;
  result.kernel = kernel;
  result.config_fingerprint = config.fingerprint(kernel);

  std::vector<ShapeContext> contexts(manifest.entries.size());
  parallel_for(manifest.entries.size(), config.threads, [&](std::size_t i) {
    contexts[i] = ingest_entry(manifest.entries[i], config);
  });

  const PathKernelKind kind = path_kind_of(kernel);
  const bool needs_profile = kernel == KernelSelector::ChangeClassic ||
                             kernel == KernelSelector::New;
  if (needs_profile) {
    parallel_for(contexts.size(), config.threads, [&](std::size_t i) {
      if (!contexts[i].ok) return;
      try {
        contexts[i].profile =
            profile_bag(contexts[i].bag, kind, config.path_config(), config.nu);
      } catch (const Error& e) {
        contexts[i].ok = false;
        contexts[i].error = std::string(to_string(e.code())) + ": " + e.what();
      }
    });
  }

  std::vector<const ShapeContext*> ok;
  for (const auto& ctx : contexts) {
    if (ctx.ok) ok.push_back(&ctx);
    else result.failed.push_back(ctx.entry.id + ": " + ctx.error);
  }
  const std::size_t n = ok.size();
  for (const auto* ctx : ok) {
    result.ids.push_back(ctx->entry.id);
    result.labels.push_back(ctx->entry.class_label);
  }

  result.values = Matrix(n, n);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<std::string> pair_errors(pairs.size());
  parallel_for(pairs.size(), config.threads, [&](std::size_t p) {
    auto [i, j] = pairs[p];
    try {
      const double v = pair_kernel(*ok[i], *ok[j], kernel, config);
      result.values.at(i, j) = v;
      result.values.at(j, i) = v;
    } catch (const Error& e) {
      pair_errors[p] = e.what();
    }
  });
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (!pair_errors[p].empty())
      fail(ErrorCode::BadArgument,
           "kernel evaluation failed for pair (" + result.ids[pairs[p].first] +
               ", " + result.ids[pairs[p].second] + "): " + pair_errors[p]);

  if (n > 0) {
    std::vector<double> eig = symmetric_eigenvalues(result.values);
    result.min_eigenvalue = eig.front();
    result.max_eigenvalue = eig.back();
    result.indefinite_warning = result.min_eigenvalue < -1e-6;
  }
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_gram_csv(const GramResult& gram, const std::string& file_path) {
  std::ofstream out(file_path, std::ios::binary);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + file_path);
  out << "id";
  for (const auto& id : gram.ids) out << "," << id;
  out << "\n";
  for (std::size_t i = 0; i < gram.ids.size(); ++i) {
    out << gram.ids[i];
    for (std::size_t j = 0; j < gram.ids.size(); ++j)
      out << "," << format_double(gram.values.at(i, j));
    out << "\n";
  }
}

void write_gram_sidecar(const GramResult& gram, const HarnessConfig& config,
                        const std::string& csv_path) {
  nlohmann::json doc = {
      {"kernel", to_string(gram.kernel)},
      {"config", config.resolved()},
      {"config_fingerprint", gram.config_fingerprint},
      {"min_eigenvalue", gram.min_eigenvalue},
      {"max_eigenvalue", gram.max_eigenvalue},
      {"indefinite_warning", gram.indefinite_warning},
      {"shape_count", gram.ids.size()},
      {"failed", gram.failed}};
  std::ofstream out(csv_path + ".meta.json");
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write sidecar for " + csv_path);
  out << doc.dump(2) << "\n";
}

LoadedGram read_gram_csv(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open " + file_path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::BadFormat, "empty gram csv");
  std::vector<std::string> header = split(line, ',');
  if (header.size() < 2 || header[0] != "id")
    fail(ErrorCode::BadFormat, "gram csv must start with an id header row");
  LoadedGram gram;
  gram.ids.assign(header.begin() + 1, header.end());
  const std::size_t n = gram.ids.size();
  gram.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      fail(ErrorCode::BadFormat, "gram csv truncated at row " + std::to_string(i));
    std::vector<std::string> parts = split(line, ',');
    if (parts.size() != n + 1 || parts[0] != gram.ids[i])
      fail(ErrorCode::BadFormat, "gram csv row " + std::to_string(i) + " malformed");
    for (std::size_t j = 0; j < n; ++j) gram.values.at(i, j) = std::stod(parts[j + 1]);
  }
  return gram;
}

double kernel_distance(double k_xx, double k_yy, double k_xy) {
  return std::sqrt(std::max(0.0, k_xx + k_yy - 2.0 * k_xy));
}

int good_matches(const std::vector<double>& distance_row,
                 const std::vector<std::string>& ids,
                 const std::vector<std::string>& labels,
                 const std::string& query_class) {
  const std::size_t n = distance_row.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distance_row[a] != distance_row[b]) return distance_row[a] < distance_row[b];
    return ids[a] < ids[b];
  });
  int count = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (labels[order[rank]] != query_class) break;
    ++count;
  }
  return count;
}

RetrievalReport retrieval_from_gram(const Matrix& gram,
                                    const std::vector<std::string>& ids,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& classes) {
  const std::size_t n = ids.size();
  std::vector<std::string> scored = classes;
  if (scored.empty()) {
    for (const auto& l : labels)
      if (std::find(scored.begin(), scored.end(), l) == scored.end())
        scored.push_back(l);
  }

  RetrievalReport report;
  std::map<std::string, std::pair<double, int>> per_class;  // sum, count
  for (std::size_t q = 0; q < n; ++q) {
    if (std::find(scored.begin(), scored.end(), labels[q]) == scored.end())
      continue;
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j)
      row[j] = kernel_distance(gram.at(q, q), gram.at(j, j), gram.at(q, j));
    const int matches = good_matches(row, ids, labels, labels[q]);
    report.rows.push_back({ids[q], labels[q], matches});
    auto& acc = per_class[labels[q]];
    acc.first += matches;
    acc.second += 1;
  }
  for (const std::string& c : scored) {
    auto it = per_class.find(c);
    if (it == per_class.end()) continue;
    report.class_means.emplace_back(c, it->second.first / it->second.second);
  }
  return report;
}

RetrievalReport run_retrieval(const DatasetManifest& manifest,
                              KernelSelector kernel, const HarnessConfig& config) {
  GramResult gram = compute_gram(manifest, kernel, config);
  RetrievalReport report =
      retrieval_from_gram(gram.values, gram.ids, gram.labels, config.classes);
  report.kernel = to_string(kernel);
  report.config_fingerprint = gram.config_fingerprint;
  report.failed = gram.failed;
  return report;
}

void write_retrieval_csv(const RetrievalReport& report, const std::string& file_path) {
  std::ofstream out(file_path, std::ios::binary);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + file_path);
  out << "record,id,class,value\n";
  for (const auto& row : report.rows)
    out << "shape," << row.id << "," << row.class_label << "," << row.good_matches
        << "\n";
  for (const auto& [c, mean] : report.class_means)
    out << "class_mean,," << c << "," << format_double(mean) << "\n";
  for (const auto& f : report.failed) out << "failed," << f << ",,\n";
}

ClassificationReport run_classification(const DatasetManifest& manifest,
                                        KernelSelector kernel,
                                        const HarnessConfig& config) {
  GramResult gram = compute_gram(manifest, kernel, config);
  const std::size_t n = gram.ids.size();

  ClassificationReport report;
  report.kernel = to_string(kernel);
  report.config_fingerprint = gram.config_fingerprint;
  report.failed = gram.failed;
  report.indefinite_kernel = gram.indefinite_warning;

  std::map<std::string, std::vector<int>> by_class;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (!by_class.count(gram.labels[i])) order.push_back(gram.labels[i]);
    by_class[gram.labels[i]].push_back(static_cast<int>(i));
  }

  // Negative models: one shape of each class outside the target list; when
  // none exist (small synthetic datasets), one of each other class.
  std::vector<std::string> outside;
  for (const std::string& c : order)
    if (std::find(config.classes.begin(), config.classes.end(), c) ==
        config.classes.end())
      outside.push_back(c);

  for (const std::string& target : config.classes) {
    auto it = by_class.find(target);
    if (it == by_class.end()) continue;
    const std::vector<int>& members = it->second;
    if (static_cast<int>(members.size()) <= config.train_per_class) continue;

    std::vector<int> train(members.begin(),
                           members.begin() + config.train_per_class);
    const std::vector<std::string>& negatives_from =
        outside.empty() ? order : outside;
    for (const std::string& c : negatives_from) {
      if (c == target) continue;
      train.push_back(by_class[c].front());
    }

    std::vector<int> labels_pm(n);
    for (std::size_t i = 0; i < n; ++i)
      labels_pm[i] = gram.labels[i] == target ? 1 : -1;

    std::set<int> train_set(train.begin(), train.end());
    std::vector<int> eval;
    for (std::size_t i = 0; i < n; ++i)
      if (!train_set.count(static_cast<int>(i))) eval.push_back(static_cast<int>(i));

    MarginSelection sel = select_margin_parameter(gram.values, labels_pm, train,
                                                  eval, config.c_grid);

    ClassificationRow row;
    row.class_label = target;
    row.train_positives = config.train_per_class;
    row.eval_class_size = static_cast<int>(members.size()) - config.train_per_class;
    row.recognized = sel.true_positives;
    row.false_positives = sel.false_positives;
    row.chosen_c = sel.C;
    row.feasible = sel.feasible;
    report.rows.push_back(row);
  }
  return report;
}

void write_classification_csv(const ClassificationReport& report,
                              const std::string& file_path) {
  std::ofstream out(file_path, std::ios::binary);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + file_path);
  out << "class,train_positives,eval_class_size,recognized,false_positives,"
         "chosen_C,feasible,kernel,indefinite\n";
  for (const auto& row : report.rows)
    out << row.class_label << "," << row.train_positives << ","
        << row.eval_class_size << "," << row.recognized << ","
        << row.false_positives << "," << format_double(row.chosen_c) << ","
        << (row.feasible ? 1 : 0) << "," << report.kernel << ","
        << (report.indefinite_kernel ? 1 : 0) << "\n";
  for (const auto& f : report.failed) out << "# failed " << f << "\n";
}

void write_resolved_config(const HarnessConfig& config, KernelSelector kernel,
                           const std::string& out_path) {
  nlohmann::json doc = config.resolved();
  doc["kernel"] = to_string(kernel);
  doc["config_fingerprint"] = config.fingerprint(kernel);
  std::ofstream out(out_path + ".config.json");
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write config for " + out_path);
  out << doc.dump(2) << "\n";
}

}  // namespace hbop
