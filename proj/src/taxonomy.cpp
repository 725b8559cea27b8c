#include "dxtk/taxonomy.hpp"

#include <algorithm>
#include <fstream>

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"
#include "dxtk/version.hpp"

namespace dxtk {

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw DataError("invalid JSON document: " + path);
  return doc;
}

void check_format_version(const nlohmann::json& doc, const std::string& what) {
  if (!doc.contains("format_version")) {
    throw DataError(what + ": missing format_version field");
  }
  if (!doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kFormatVersion) {
    throw DataError(what + ": unsupported format_version (expected " +
                    std::to_string(kFormatVersion) + ")");
  }
}

}  // namespace

std::optional<Malignancy> parse_malignancy(std::string_view raw) {
  const std::string c = canonical_label(raw);
  if (c == "benign") return Malignancy::benign;
  if (c == "malignant") return Malignancy::malignant;
  if (c == "precancerous in situ") return Malignancy::precancerous_in_situ;
  return std::nullopt;
}

std::string_view to_string(Malignancy m) {
  switch (m) {
    case Malignancy::benign: return "benign";
    case Malignancy::malignant: return "malignant";
    case Malignancy::precancerous_in_situ: return "precancerous in situ";
  }
  return "benign";
}

std::size_t TaxonomyAnnotation::depth_of(std::string_view label) const {
  const std::string c = canonical_label(label);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] == c) return i + 1;
  }
  return 0;
}

TaxonomyTree TaxonomyTree::from_json(const nlohmann::json& doc) {
  check_format_version(doc, "taxonomy");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw DataError("taxonomy: missing nodes array");
  }

  TaxonomyTree tree;
  for (const auto& entry : doc["nodes"]) {
    if (!entry.contains("label") || !entry["label"].is_string()) {
      throw DataError("taxonomy: node without a string label");
    }
    TaxonomyNode node;
    node.label = canonical_label(entry["label"].get<std::string>());
    if (node.label.empty()) throw DataError("taxonomy: empty label");
    if (tree.nodes_.count(node.label)) {
      throw DataError("taxonomy: duplicate label \"" + node.label + "\"");
    }
    if (entry.contains("parent") && !entry["parent"].is_null()) {
      if (!entry["parent"].is_string()) {
        throw DataError("taxonomy: non-string parent on \"" + node.label + "\"");
      }
      node.parent = canonical_label(entry["parent"].get<std::string>());
      if (node.parent->empty()) node.parent.reset();
    }
    if (!entry.contains("malignancy") || !entry["malignancy"].is_string()) {
      throw DataError("taxonomy: missing malignancy on \"" + node.label + "\"");
    }
    const auto malig = parse_malignancy(entry["malignancy"].get<std::string>());
    if (!malig) {
      throw DataError("taxonomy: invalid malignancy value \"" +
                      entry["malignancy"].get<std::string>() + "\" on \"" +
                      node.label + "\"");
    }
    node.malignancy = *malig;
    tree.nodes_.emplace(node.label, std::move(node));
  }

  for (auto& [label, node] : tree.nodes_) {
    if (!node.parent) {
      tree.roots_.push_back(label);
      continue;
    }
    auto it = tree.nodes_.find(*node.parent);
    if (it == tree.nodes_.end()) {
      throw DataError("taxonomy: node \"" + label + "\" names missing parent \"" +
                      *node.parent + "\"");
    }
    it->second.children.push_back(label);
    if (it->second.malignancy != node.malignancy) {
      tree.warnings_.push_back("malignancy of \"" + label + "\" (" +
                               std::string(to_string(node.malignancy)) +
                               ") differs from parent \"" + *node.parent + "\" (" +
                               std::string(to_string(it->second.malignancy)) + ")");
    }
  }
  for (auto& [label, node] : tree.nodes_) {
    std::sort(node.children.begin(), node.children.end());
  }

  // Walk up from every node; a chain longer than the node count is a cycle.
  for (const auto& [label, node] : tree.nodes_) {
    const TaxonomyNode* cur = &node;
    std::size_t steps = 0;
    while (cur->parent) {
      if (++steps > tree.nodes_.size()) {
        throw DataError("taxonomy: cycle detected involving \"" + label + "\"");
      }
      cur = &tree.nodes_.at(*cur->parent);
    }
  }
  return tree;
}

TaxonomyTree TaxonomyTree::load_file(const std::string& path) {
  return from_json(load_json_file(path));
}

bool TaxonomyTree::contains(std::string_view label) const {
  return nodes_.count(canonical_label(label)) > 0;
}

const TaxonomyNode* TaxonomyTree::find(std::string_view label) const {
  auto it = nodes_.find(canonical_label(label));
  return it == nodes_.end() ? nullptr : &it->second;
}

const TaxonomyNode& TaxonomyTree::at(std::string_view label) const {
  const TaxonomyNode* node = find(label);
  if (!node) throw DataError("unknown taxonomy label \"" + canonical_label(label) + "\"");
  return *node;
}

TaxonomyAnnotation TaxonomyTree::path_of(std::string_view label) const {
  const TaxonomyNode* node = &at(label);
  TaxonomyAnnotation annotation;
  annotation.malignancy = node->malignancy;
  annotation.path.push_back(node->label);
  while (node->parent) {
    node = &nodes_.at(*node->parent);
    annotation.path.push_back(node->label);
  }
  std::reverse(annotation.path.begin(), annotation.path.end());
  return annotation;
}

std::optional<std::string> TaxonomyTree::parent_of(std::string_view label) const {
  const TaxonomyNode* node = find(label);
  return node ? node->parent : std::nullopt;
}

const std::vector<std::string>& TaxonomyTree::children_of(std::string_view label) const {
  static const std::vector<std::string> kEmpty;
  const TaxonomyNode* node = find(label);
  return node ? node->children : kEmpty;
}

std::vector<std::string> TaxonomyTree::labels() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [label, node] : nodes_) out.push_back(label);
  return out;
}

double depth_weight(std::size_t path_len, std::size_t depth) {
  if (path_len == 0 || depth < 1 || depth > path_len) {
    throw DataError("depth " + std::to_string(depth) + " out of range for path length " +
                    std::to_string(path_len));
  }
  return static_cast<double>(depth) / static_cast<double>(path_len);
}

void DdxGraph::insert_edge(std::string_view a, std::string_view b) {
  const std::string ca = canonical_label(a);
  const std::string cb = canonical_label(b);
  if (ca.empty() || cb.empty()) throw DataError("ddx graph: empty label in edge");
  if (ca == cb) throw DataError("ddx graph: self-loop on \"" + ca + "\"");
  adjacency_[ca].insert(cb);
  adjacency_[cb].insert(ca);
}

DdxGraph DdxGraph::from_json(const nlohmann::json& doc) {
  check_format_version(doc, "ddx graph");
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw DataError("ddx graph: missing edges array");
  }
  DdxGraph graph;
  for (const auto& edge : doc["edges"]) {
    if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() ||
        !edge[1].is_string()) {
      throw DataError("ddx graph: edge must be a pair of labels");
    }
    graph.insert_edge(edge[0].get<std::string>(), edge[1].get<std::string>());
  }
  return graph;
}

DdxGraph DdxGraph::load_file(const std::string& path) {
  return from_json(load_json_file(path));
}

DdxGraph DdxGraph::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges) {
  DdxGraph graph;
  for (const auto& [a, b] : edges) graph.insert_edge(a, b);
  return graph;
}

bool DdxGraph::contains(std::string_view label) const {
  return adjacency_.count(canonical_label(label)) > 0;
}

const std::set<std::string>& DdxGraph::neighbors(std::string_view label) const {
  static const std::set<std::string> kEmpty;
  auto it = adjacency_.find(canonical_label(label));
  return it == adjacency_.end() ? kEmpty : it->second;
}

std::size_t DdxGraph::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& [label, nbrs] : adjacency_) degree_sum += nbrs.size();
  return degree_sum / 2;
}

std::vector<std::string> DdxGraph::unresolved_labels(const TaxonomyTree& tree) const {
  std::vector<std::string> out;
  for (const auto& [label, nbrs] : adjacency_) {
    if (!tree.contains(label)) out.push_back(label);
  }
  return out;
}

void CaseIndex::add(std::string_view diagnosis, std::size_t count) {
  counts_[canonical_label(diagnosis)] += count;
}

std::size_t CaseIndex::count(std::string_view diagnosis) const {
  auto it = counts_.find(canonical_label(diagnosis));
  return it == counts_.end() ? 0 : it->second;
}

std::optional<std::string> resolve_ddx_neighbor(std::string_view diagnosis,
                                                const DdxGraph& ddx,
                                                const TaxonomyTree& tree,
                                                const CaseIndex& cases) {
  const std::string d = canonical_label(diagnosis);

  const std::set<std::string>* candidates = nullptr;
  if (const auto& adj = ddx.neighbors(d); !adj.empty()) {
    candidates = &adj;
  } else if (const auto parent = tree.parent_of(d)) {
    if (const auto& padj = ddx.neighbors(*parent); !padj.empty()) {
      candidates = &padj;
    }
  }
  if (!candidates) return std::nullopt;

  // std::set iterates in lexicographic order, which fixes the "any"
  // choices the search would otherwise leave open.
  for (const auto& candidate : *candidates) {
    if (candidate == d) continue;
    if (cases.has_case(candidate)) return candidate;
    for (const auto& child : tree.children_of(candidate)) {
      if (child == d) continue;
      if (cases.has_case(child)) return child;
    }
  }
  return std::nullopt;
}

}  // namespace dxtk
