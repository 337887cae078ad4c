#include "hgmm/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hgmm {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "hgmm-tree";
constexpr int kFormatVersion = 1;

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vector parse_vector(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

Matrix parse_matrix(const json& j, Eigen::Index dim) {
  if (static_cast<Eigen::Index>(j.size()) != dim) throw TreeFormatError("covariance has wrong row count");
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != dim) throw TreeFormatError("covariance has wrong column count");
    for (Eigen::Index k = 0; k < dim; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json component_json(const GaussianComponent& c) {
  return json{{"mean", vector_json(c.mean())}, {"covariance", matrix_json(c.covariance())}};
}

GaussianComponent parse_component(const json& j) {
  Vector mean = parse_vector(j.at("mean"));
  Matrix cov = parse_matrix(j.at("covariance"), mean.size());
  return GaussianComponent::from_exact(std::move(mean), std::move(cov));
}

json indices_json(const IndexSet& s) {
  json out = json::array();
  for (auto i : s) out.push_back(i);
  return out;
}

}  // namespace

std::string serialize_tree(const Dendrogram& tree) {
  const auto& p = tree.params;
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["dataset_fingerprint"] = tree.dataset_fingerprint;
  doc["data_size"] = tree.data_size;
  doc["params"] = {
      {"components", p.components},
      {"em_iters", p.em_iters},
      {"restarts", p.restarts},
      {"min_distinct", p.min_distinct},
      {"max_nodes", p.max_nodes},
      {"budget_includes_root", p.budget_includes_root},
      {"background_enabled", p.background_enabled},
      {"seed", p.seed},
  };
  doc["root"] = tree.root;
  json nodes = json::array();
  for (const auto& node : tree.nodes) {
    json n;
    n["id"] = node.id;
    n["parent"] = node.parent ? json(*node.parent) : json(nullptr);
    n["attached"] = indices_json(node.attached);
    n["children"] = node.children;
    n["log_likelihood"] = node.log_likelihood ? json(*node.log_likelihood) : json(nullptr);
    if (node.mixture) {
      const auto& mix = *node.mixture;
      json comps = json::array();
      for (std::size_t i = 0; i < mix.components.size(); ++i) {
        json c = component_json(mix.components[i]);
        c["weight"] = mix.weights(static_cast<Eigen::Index>(i));
        comps.push_back(std::move(c));
      }
      n["mixture"] = {
          {"alpha", mix.alpha},
          {"background_enabled", mix.background_enabled},
          {"background", component_json(mix.background)},
          {"components", std::move(comps)},
      };
    } else {
      n["mixture"] = nullptr;
    }
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(1) + "\n";
}

Dendrogram parse_tree(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw TreeFormatError(std::string("tree document is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName)
      throw TreeFormatError("not a tree document");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw TreeFormatError("unsupported tree document version");

    Dendrogram tree;
    tree.dataset_fingerprint = doc.at("dataset_fingerprint").get<std::string>();
    tree.data_size = doc.at("data_size").get<std::size_t>();
    const auto& p = doc.at("params");
    tree.params.components = p.at("components").get<std::size_t>();
    tree.params.em_iters = p.at("em_iters").get<std::size_t>();
    tree.params.restarts = p.at("restarts").get<std::size_t>();
    tree.params.min_distinct = p.at("min_distinct").get<std::size_t>();
    tree.params.max_nodes = p.at("max_nodes").get<std::size_t>();
    tree.params.budget_includes_root = p.at("budget_includes_root").get<bool>();
    tree.params.background_enabled = p.at("background_enabled").get<bool>();
    tree.params.seed = p.at("seed").get<std::uint64_t>();
    tree.root = doc.at("root").get<NodeId>();

    for (const auto& n : doc.at("nodes")) {
      DendrogramNode node;
      node.id = n.at("id").get<NodeId>();
      if (node.id != tree.nodes.size()) throw TreeFormatError("node ids must be 0..count-1 in order");
      if (!n.at("parent").is_null()) node.parent = n.at("parent").get<NodeId>();
      node.attached = n.at("attached").get<IndexSet>();
      node.children = n.at("children").get<std::vector<NodeId>>();
      if (!n.at("log_likelihood").is_null()) node.log_likelihood = n.at("log_likelihood").get<double>();
      const auto& mj = n.at("mixture");
      if (!mj.is_null()) {
        BackgroundMixture mix{
            .alpha = mj.at("alpha").get<double>(),
            .background = parse_component(mj.at("background")),
            .weights = Vector(static_cast<Eigen::Index>(mj.at("components").size())),
            .components = {},
            .background_enabled = mj.at("background_enabled").get<bool>(),
        };
        Eigen::Index i = 0;
        for (const auto& c : mj.at("components")) {
          mix.components.push_back(parse_component(c));
          mix.weights(i++) = c.at("weight").get<double>();
        }
        node.mixture = std::move(mix);
      }
      tree.nodes.push_back(std::move(node));
    }
    if (tree.nodes.empty() || tree.root >= tree.nodes.size())
      throw TreeFormatError("tree document has no root node");
    for (const auto& node : tree.nodes)
      for (NodeId c : node.children)
        if (c >= tree.nodes.size() || c <= node.id) throw TreeFormatError("bad child id");
    // Input sets are implied by the attached sets of each subtree.
    for (auto& node : tree.nodes) node.input_indices = gather_subtree(tree, node.id);
    return tree;
  } catch (const json::exception& e) {
    throw TreeFormatError(std::string("malformed tree document: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const TreeFormatError*>(&e)) throw;
    throw TreeFormatError(std::string("malformed tree document: ") + e.what());
  }
}

Dendrogram load_tree_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tree(buf.str());
}

void save_tree_file(const std::string& path, const Dendrogram& tree) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << serialize_tree(tree);
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

std::string tree_to_dot(const Dendrogram& tree) {
  std::ostringstream out;
  out << "digraph dendrogram {\n  node [shape=box];\n";
  for (const auto& node : tree.nodes) {
    char alpha[32] = "-";
    if (node.mixture) std::snprintf(alpha, sizeof alpha, "%.6g", node.mixture->alpha);
    out << "  n" << node.id << " [label=\"" << node.id << "\\nattached=" << node.attached.size()
        << "\\nalpha=" << alpha << "\"];\n";
  }
  for (const auto& node : tree.nodes)
    for (NodeId c : node.children) out << "  n" << node.id << " -> n" << c << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace hgmm
