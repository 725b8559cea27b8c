#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dxtk {

enum class Malignancy { benign, malignant, precancerous_in_situ };

// Accepts any casing/spacing of "benign", "malignant", "precancerous in situ".
std::optional<Malignancy> parse_malignancy(std::string_view raw);
std::string_view to_string(Malignancy m);

struct TaxonomyNode {
  std::string label;                  // canonical
  std::optional<std::string> parent;  // canonical
  Malignancy malignancy = Malignancy::benign;
  std::vector<std::string> children;  // derived at load, sorted
};

// Root-to-target label chain plus the malignancy of the terminal label.
struct TaxonomyAnnotation {
  std::vector<std::string> path;  // canonical labels, root first, non-empty
  Malignancy malignancy = Malignancy::benign;

  std::size_t length() const { return path.size(); }
  const std::string& leaf() const { return path.back(); }
  // 1-based depth of `label` on the path, 0 if off-path. Input is
  // canonicalized before comparison.
  std::size_t depth_of(std::string_view label) const;
};

// The diagnosis hierarchy. Multiple roots are accepted; the parent relation
// is validated acyclic at load and the structure is immutable afterwards, so
// all queries are safe for concurrent readers.
class TaxonomyTree {
 public:
  static TaxonomyTree from_json(const nlohmann::json& doc);
  static TaxonomyTree load_file(const std::string& path);

  bool contains(std::string_view label) const;
  const TaxonomyNode* find(std::string_view label) const;  // nullptr if absent
  const TaxonomyNode& at(std::string_view label) const;    // throws DataError

  TaxonomyAnnotation path_of(std::string_view label) const;
  std::optional<std::string> parent_of(std::string_view label) const;
  // Children of `label`; empty if the label is absent or a leaf.
  const std::vector<std::string>& children_of(std::string_view label) const;

  std::size_t size() const { return nodes_.size(); }
  const std::map<std::string, TaxonomyNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& roots() const { return roots_; }
  // Sorted canonical label universe.
  std::vector<std::string> labels() const;
  // Malignancy-inheritance mismatches noted at load; never fatal.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::map<std::string, TaxonomyNode> nodes_;
  std::vector<std::string> roots_;
  std::vector<std::string> warnings_;
};

// Normalized depth weight i/L for a path of length L. Both arguments are
// 1-based; throws DataError when depth falls outside [1, path_len].
double depth_weight(std::size_t path_len, std::size_t depth);

// Undirected graph over clinically confusable diagnoses. Symmetric by
// construction; self-loops are rejected at load.
class DdxGraph {
 public:
  static DdxGraph from_json(const nlohmann::json& doc);
  static DdxGraph load_file(const std::string& path);
  static DdxGraph from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges);

  bool contains(std::string_view label) const;
  const std::set<std::string>& neighbors(std::string_view label) const;
  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const;
  const std::map<std::string, std::set<std::string>>& adjacency() const {
    return adjacency_;
  }
  // Graph labels missing from the tree. Reported as warnings, not errors:
  // the fallback search guards membership explicitly.
  std::vector<std::string> unresolved_labels(const TaxonomyTree& tree) const;

 private:
  void insert_edge(std::string_view a, std::string_view b);

  std::map<std::string, std::set<std::string>> adjacency_;
};

// Case availability per canonical diagnosis label.
class CaseIndex {
 public:
  void add(std::string_view diagnosis, std::size_t count = 1);
  std::size_t count(std::string_view diagnosis) const;
  bool has_case(std::string_view diagnosis) const { return count(diagnosis) > 0; }
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

 private:
  std::map<std::string, std::size_t> counts_;
};

// Hierarchical DDX fallback search. Candidates come from the DDX
// neighborhood of `diagnosis`, else from the neighborhood of its taxonomy
// parent, else the search fails. Each candidate is accepted if it has at
// least one case; otherwise its first child (by label order) with a case is
// accepted instead. Candidates are visited in lexicographic order and the
// result never equals `diagnosis`.
std::optional<std::string> resolve_ddx_neighbor(std::string_view diagnosis,
                                                const DdxGraph& ddx,
                                                const TaxonomyTree& tree,
                                                const CaseIndex& cases);

}  // namespace dxtk
