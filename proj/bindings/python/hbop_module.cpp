#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hbop/bag_kernels.hpp"
#include "hbop/errors.hpp"
#include "hbop/harness.hpp"
#include "hbop/image.hpp"
#include "hbop/matrix.hpp"
#include "hbop/path_kernels.hpp"
#include "hbop/paths.hpp"
#include "hbop/svm.hpp"

namespace py = pybind11;
using namespace hbop;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m)
      fail(ErrorCode::BadArgument, "matrix rows must have equal length");
    for (std::size_t j = 0; j < m; ++j) out.at(i, j) = rows[i][j];
  }
  return out;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m.at(i, j);
  return rows;
}

ShapeImage shape_from_rows(const std::vector<std::vector<int>>& rows,
                           const std::string& id, const std::string& cls) {
  const int h = static_cast<int>(rows.size());
  const int w = h == 0 ? 0 : static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> mask;
  mask.reserve(static_cast<std::size_t>(w) * h);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != w)
      fail(ErrorCode::BadArgument, "mask rows must have equal length");
    for (int v : row) mask.push_back(static_cast<std::uint8_t>(v != 0));
  }
  return make_shape(w, h, std::move(mask), id, cls);
}

PathKernelKind kind_from_name(const std::string& name) {
  if (name == "classic") return PathKernelKind::Classic;
  if (name == "edit") return PathKernelKind::Edit;
  fail(ErrorCode::BadArgument, "path kernel must be 'classic' or 'edit'");
}

}  // namespace

PYBIND11_MODULE(hbop, m) {
  m.doc() = "hierarchical bag-of-paths shape kernels";

  py::register_exception<Error>(m, "HbopError");

  py::class_<ShapeImage>(m, "ShapeImage")
      .def_readonly("width", &ShapeImage::width)
      .def_readonly("height", &ShapeImage::height)
      .def_readwrite("id", &ShapeImage::id)
      .def_readwrite("class_label", &ShapeImage::class_label)
      .def("at", &ShapeImage::at)
      .def("foreground_count", &ShapeImage::foreground_count);

  m.def("make_shape", &shape_from_rows, py::arg("rows"), py::arg("id") = "",
        py::arg("class_label") = "",
        "Build a validated shape from nested 0/1 rows");
  m.def("load_mask", &load_mask, py::arg("path"));
  m.def("save_pbm", &save_pbm, py::arg("shape"), py::arg("path"));

  py::class_<Skeleton>(m, "Skeleton")
      .def_readonly("width", &Skeleton::width)
      .def_readonly("height", &Skeleton::height)
      .def_readonly("total_boundary", &Skeleton::total_boundary)
      .def("pixel_count", &Skeleton::pixel_count)
      .def("pixels",
           [](const Skeleton& s) {
             std::vector<std::pair<int, int>> out;
             for (const Point& p : s.pixel_list()) out.emplace_back(p.x, p.y);
             return out;
           })
      .def("radius_at", [](const Skeleton& s, int x, int y) {
        return s.radius[s.index(x, y)];
      });

  m.def("skeletonize", &skeletonize, py::arg("shape"));

  py::class_<GraphNode>(m, "GraphNode")
      .def_property_readonly("x", [](const GraphNode& n) { return n.pos.x; })
      .def_property_readonly("y", [](const GraphNode& n) { return n.pos.y; })
      .def_readonly("attr", &GraphNode::attr)
      .def_readonly("label", &GraphNode::label);

  py::class_<GraphEdge>(m, "GraphEdge")
      .def_readonly("u", &GraphEdge::u)
      .def_readonly("v", &GraphEdge::v)
      .def_readonly("weight", &GraphEdge::weight)
      .def_readonly("angle", &GraphEdge::angle);

  py::class_<SkeletalGraph>(m, "SkeletalGraph")
      .def_readonly("shape_id", &SkeletalGraph::shape_id)
      .def_readonly("class_label", &SkeletalGraph::class_label)
      .def_readonly("nodes", &SkeletalGraph::nodes)
      .def_readonly("edges", &SkeletalGraph::edges)
      .def_readonly("principal_axis", &SkeletalGraph::principal_axis)
      .def_readonly("degenerate", &SkeletalGraph::degenerate)
      .def("node_count", &SkeletalGraph::node_count)
      .def("edge_count", &SkeletalGraph::edge_count)
      .def("cycle_rank", &SkeletalGraph::cycle_rank)
      .def("to_json",
           [](const SkeletalGraph& g) { return graph_to_json(g).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return graph_from_json(nlohmann::json::parse(text));
      });

  m.def("build_graph", &build_graph, py::arg("skeleton"), py::arg("shape"));
  m.def("load_graph_json", &load_graph_json, py::arg("path"));
  m.def("save_graph_json", &save_graph_json, py::arg("graph"), py::arg("path"));

  py::class_<SpanningTree>(m, "SpanningTree")
      .def("total_weight", &SpanningTree::total_weight)
      .def("node_count", &SpanningTree::alive_node_count)
      .def("edge_count", &SpanningTree::alive_edge_count)
      .def("degree", &SpanningTree::degree)
      .def("neighbors", &SpanningTree::neighbors);

  m.def("max_spanning_tree", &max_spanning_tree, py::arg("graph"));

  py::class_<EdgeAttr>(m, "EdgeAttr")
      .def_readonly("weight", &EdgeAttr::weight)
      .def_readonly("angle", &EdgeAttr::angle);

  py::class_<Path>(m, "Path")
      .def_readonly("node_ids", &Path::node_ids)
      .def_readonly("node_attrs", &Path::node_attrs)
      .def_readonly("edge_attrs", &Path::edge_attrs)
      .def("length", &Path::length);

  py::class_<OpRecord>(m, "OpRecord")
      .def_property_readonly("kind",
                             [](const OpRecord& op) {
                               return op.kind == ReduceOp::NodeRemoval
                                          ? "node_removal"
                                          : "edge_contraction";
                             })
      .def_readonly("index", &OpRecord::index)
      .def_readonly("cost", &OpRecord::cost)
      .def_readonly("mass_dropped", &OpRecord::mass_dropped);

  py::class_<PathHierarchy>(m, "PathHierarchy")
      .def_readonly("levels", &PathHierarchy::levels)
      .def_readonly("op_log", &PathHierarchy::op_log)
      .def_readonly("D", &PathHierarchy::max_reductions)
      .def("root", &PathHierarchy::root, py::return_value_policy::reference_internal);

  py::class_<BagOfPaths>(m, "BagOfPaths")
      .def_readonly("shape_id", &BagOfPaths::shape_id)
      .def_readonly("s", &BagOfPaths::max_path_length)
      .def_readonly("D", &BagOfPaths::max_reductions)
      .def_readonly("hierarchies", &BagOfPaths::hierarchies)
      .def_readonly("empty_tree", &BagOfPaths::empty_tree)
      .def("__len__", &BagOfPaths::size)
      .def("to_json", [](const BagOfPaths& bag) { return bag_to_json(bag).dump(); });

  m.def("enumerate_bag", &enumerate_bag, py::arg("tree"), py::arg("s"),
        py::arg("D"), py::arg("shape_id") = std::string{});
  m.def("make_path", &make_path, py::arg("tree"), py::arg("node_ids"));
  m.def("node_removal_cost", &node_removal_cost, py::arg("tree"),
        py::arg("path"), py::arg("i"));
  m.def("remove_node", &remove_node, py::arg("tree"), py::arg("path"),
        py::arg("i"), py::arg("cost"));
  m.def("contract_edge", &contract_edge, py::arg("tree"), py::arg("path"),
        py::arg("i"));
  m.def("build_hierarchy", &build_hierarchy, py::arg("tree"), py::arg("root"),
        py::arg("D"));

  py::class_<PathKernelConfig>(m, "PathKernelConfig")
      .def(py::init([](double sigma_vertex, double sigma_edge, int D) {
             PathKernelConfig cfg{sigma_vertex, sigma_edge, D};
             cfg.validate();
             return cfg;
           }),
           py::arg("sigma_vertex") = 0.1, py::arg("sigma_edge") = 0.1,
           py::arg("D") = 2)
      .def_readwrite("sigma_vertex", &PathKernelConfig::sigma_vertex)
      .def_readwrite("sigma_edge", &PathKernelConfig::sigma_edge)
      .def_readwrite("D", &PathKernelConfig::D);

  m.def("k_classic", &k_classic, py::arg("a"), py::arg("b"), py::arg("config"));
  m.def("d_path2", &d_path2, py::arg("a"), py::arg("b"), py::arg("config"));
  m.def("k_edit", &k_edit, py::arg("a"), py::arg("b"), py::arg("config"));

  py::class_<OneClassModel>(m, "OneClassModel")
      .def_readonly("alpha", &OneClassModel::alpha)
      .def_readonly("rho", &OneClassModel::rho)
      .def_readonly("support_ids", &OneClassModel::support_ids)
      .def_readonly("norm_w", &OneClassModel::norm_w)
      .def_readonly("indefinite_kernel", &OneClassModel::indefinite_kernel)
      .def("to_json", [](const OneClassModel& m_) { return model_to_json(m_).dump(); });

  m.def(
      "fit_one_class",
      [](const std::vector<std::vector<double>>& gram, double nu) {
        return fit_one_class(matrix_from_rows(gram), nu);
      },
      py::arg("gram"), py::arg("nu"));

  py::class_<BagProfile>(m, "BagProfile")
      .def_readonly("self_kernel", &BagProfile::self_kernel)
      .def_readonly("model", &BagProfile::model);

  m.def(
      "profile_bag",
      [](const BagOfPaths& bag, const std::string& kind,
         const PathKernelConfig& cfg, double nu) {
        return profile_bag(bag, kind_from_name(kind), cfg, nu);
      },
      py::arg("bag"), py::arg("path_kernel"), py::arg("config"),
      py::arg("nu") = 0.9);

  m.def(
      "k_max",
      [](const BagOfPaths& a, const BagOfPaths& b, const std::string& kind,
         const PathKernelConfig& cfg) {
        return k_max(a, b, kind_from_name(kind), cfg);
      },
      py::arg("a"), py::arg("b"), py::arg("path_kernel"), py::arg("config"));
  m.def(
      "k_matching",
      [](const BagOfPaths& a, const BagOfPaths& b, const std::string& kind,
         const PathKernelConfig& cfg, double sigma) {
        return k_matching(a, b, kind_from_name(kind), cfg, sigma);
      },
      py::arg("a"), py::arg("b"), py::arg("path_kernel"), py::arg("config"),
      py::arg("sigma_matching") = 1.0);
  m.def(
      "d_change",
      [](const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
         const BagProfile& pb, const std::string& kind,
         const PathKernelConfig& cfg) {
        return d_change(a, pa, b, pb, kind_from_name(kind), cfg);
      },
      py::arg("a"), py::arg("profile_a"), py::arg("b"), py::arg("profile_b"),
      py::arg("path_kernel"), py::arg("config"));
  m.def(
      "k_change",
      [](const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
         const BagProfile& pb, const std::string& kind,
         const PathKernelConfig& cfg, double sigma) {
        return k_change(a, pa, b, pb, kind_from_name(kind), cfg, sigma);
      },
      py::arg("a"), py::arg("profile_a"), py::arg("b"), py::arg("profile_b"),
      py::arg("path_kernel"), py::arg("config"), py::arg("sigma_change") = 0.3);
  m.def(
      "d_desobry",
      [](const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
         const BagProfile& pb, const std::string& kind,
         const PathKernelConfig& cfg) {
        return d_desobry(a, pa, b, pb, kind_from_name(kind), cfg);
      },
      py::arg("a"), py::arg("profile_a"), py::arg("b"), py::arg("profile_b"),
      py::arg("path_kernel"), py::arg("config"));
  m.def(
      "k_suard",
      [](const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
         const BagProfile& pb, const std::string& kind,
         const PathKernelConfig& cfg) {
        return k_suard(a, pa, b, pb, kind_from_name(kind), cfg);
      },
      py::arg("a"), py::arg("profile_a"), py::arg("b"), py::arg("profile_b"),
      py::arg("path_kernel"), py::arg("config"));

  m.def("kernel_distance", &kernel_distance, py::arg("k_xx"), py::arg("k_yy"),
        py::arg("k_xy"));
  m.def("good_matches", &good_matches, py::arg("distance_row"), py::arg("ids"),
        py::arg("labels"), py::arg("query_class"));

  py::class_<HarnessConfig>(m, "HarnessConfig")
      .def(py::init<>())
      .def_readwrite("s", &HarnessConfig::s)
      .def_readwrite("D", &HarnessConfig::D)
      .def_readwrite("sigma_vertex", &HarnessConfig::sigma_vertex)
      .def_readwrite("sigma_edge", &HarnessConfig::sigma_edge)
      .def_readwrite("nu", &HarnessConfig::nu)
      .def_readwrite("sigma_change_new", &HarnessConfig::sigma_change_new)
      .def_readwrite("sigma_change_classic", &HarnessConfig::sigma_change_classic)
      .def_readwrite("sigma_matching", &HarnessConfig::sigma_matching)
      .def_readwrite("threads", &HarnessConfig::threads)
      .def_readwrite("classes", &HarnessConfig::classes)
      .def_readwrite("train_per_class", &HarnessConfig::train_per_class)
      .def_static("load", &HarnessConfig::load);

  m.def(
      "compute_gram",
      [](const std::string& manifest_path, const std::string& kernel,
         const HarnessConfig& cfg) {
        DatasetManifest manifest = DatasetManifest::load(manifest_path);
        GramResult gram = compute_gram(manifest, parse_kernel_selector(kernel), cfg);
        py::dict out;
        out["ids"] = gram.ids;
        out["labels"] = gram.labels;
        out["values"] = matrix_to_rows(gram.values);
        out["min_eigenvalue"] = gram.min_eigenvalue;
        out["max_eigenvalue"] = gram.max_eigenvalue;
        out["indefinite_warning"] = gram.indefinite_warning;
        out["failed"] = gram.failed;
        return out;
      },
      py::arg("manifest_path"), py::arg("kernel"),
      py::arg("config") = HarnessConfig{});

  m.def(
      "run_retrieval",
      [](const std::string& manifest_path, const std::string& kernel,
         const HarnessConfig& cfg) {
        DatasetManifest manifest = DatasetManifest::load(manifest_path);
        RetrievalReport report =
            run_retrieval(manifest, parse_kernel_selector(kernel), cfg);
        py::dict out;
        py::list rows;
        for (const auto& row : report.rows) {
          py::dict r;
          r["id"] = row.id;
          r["class"] = row.class_label;
          r["good_matches"] = row.good_matches;
          rows.append(r);
        }
        out["rows"] = rows;
        py::dict means;
        for (const auto& [cls, mean] : report.class_means)
          means[py::str(cls)] = mean;
        out["class_means"] = means;
        out["failed"] = report.failed;
        return out;
      },
      py::arg("manifest_path"), py::arg("kernel"),
      py::arg("config") = HarnessConfig{});

  m.def(
      "run_classification",
      [](const std::string& manifest_path, const std::string& kernel,
         const HarnessConfig& cfg) {
        DatasetManifest manifest = DatasetManifest::load(manifest_path);
        ClassificationReport report =
            run_classification(manifest, parse_kernel_selector(kernel), cfg);
        py::list rows;
        for (const auto& row : report.rows) {
          py::dict r;
          r["class"] = row.class_label;
          r["recognized"] = row.recognized;
          r["eval_class_size"] = row.eval_class_size;
          r["false_positives"] = row.false_positives;
          r["chosen_C"] = row.chosen_c;
          r["feasible"] = row.feasible;
          rows.append(r);
        }
        py::dict out;
        out["rows"] = rows;
        out["indefinite_kernel"] = report.indefinite_kernel;
        out["failed"] = report.failed;
        return out;
      },
      py::arg("manifest_path"), py::arg("kernel"),
      py::arg("config") = HarnessConfig{});
}
