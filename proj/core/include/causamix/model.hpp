#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "causamix/errors.hpp"

namespace causamix {

enum class NodeKind {
  ObservedUnderlying,    // Y: observed underlying variable (measurement-error models)
  UnobservedUnderlying,  // Z: unobserved underlying variable, seen only through its measurement
  Measurement,           // U: noisy measurement of a Z node
  ObservedUr,            // X: observed variable (unobserved-root models)
  LatentRoot,            // H: latent root cause
};

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& text);

struct Node {
  int id = -1;
  std::string name;
  NodeKind kind = NodeKind::ObservedUnderlying;
};

struct Edge {
  int src = -1;
  int dst = -1;
  double weight = 0.0;
};

// Weighted directed acyclic graph over integer node ids. Ids need not be
// contiguous. Edge weights are nonzero; setting a weight to zero removes the
// edge. Insertion of an edge that would close a cycle throws CycleDetected.
class WeightedDag {
 public:
  void add_node(int id, std::string name, NodeKind kind);
  bool has_node(int id) const { return nodes_.count(id) > 0; }
  const Node& node(int id) const;

  // Sets, replaces, or (weight == 0) removes the edge src -> dst.
  void set_edge(int src, int dst, double weight);
  bool has_edge(int src, int dst) const;
  double weight(int src, int dst) const;  // 0 when the edge is absent

  std::vector<int> node_ids() const;  // ascending
  std::vector<Edge> edges() const;    // ascending by (src, dst)
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const;

  std::vector<int> parents(int id) const;   // ascending
  std::vector<int> children(int id) const;  // ascending

  // Proper ancestors / descendants: the node itself is not included.
  std::set<int> ancestors(int id) const;
  std::set<int> descendants(int id) const;

  // Deterministic topological order (smallest id first among ready nodes).
  std::vector<int> topological_order() const;

 private:
  void require_node(int id) const;
  bool reaches(int from, int to) const;

  std::map<int, Node> nodes_;
  std::map<int, std::map<int, double>> out_;
  std::map<int, std::map<int, double>> in_;
};

// Linear model with measurement error. Underlying nodes are observed (Y) or
// unobserved (Z); every Z is read through exactly one measurement node U with
// unit weight. A Z node is a "u-leaf" when it has no underlying children.
//
// In canonical form u-leaf nodes carry no exogenous noise of their own: it is
// absorbed into their measurement's noise. `u_leaf_noise_ids` lists the u-leaf
// Z nodes whose (merged) noise column is present in the overall mixing matrix.
// canonicalize_me and the synthetic generator keep every u-leaf in the set;
// a fixture may leave some out to model a measurement row without its own
// noise column.
struct SemMeModel {
  WeightedDag dag;
  std::map<int, int> measurement_of;  // z id -> u id
  bool canonical = false;
  std::set<int> u_leaf_noise_ids;

  void validate() const;

  std::vector<int> underlying_ids() const;  // Z and Y, ascending
  std::vector<int> z_ids() const;
  std::vector<int> y_ids() const;
  std::vector<int> u_ids() const;  // measurement ids, ascending by their Z id

  bool is_u_leaf(int z_id) const;
  std::vector<int> u_leaf_ids() const;

  // Underlying children / parents: measurement nodes are skipped.
  std::vector<int> underlying_children(int id) const;
  std::vector<int> underlying_parents(int id) const;
};

// Builds the measurement side of an ME model: adds one Measurement node per
// unobserved underlying node (id = offset + z id unless taken, then the next
// free id) with a unit-weight edge, and fills `measurement_of`.
void attach_measurements(SemMeModel& model);

struct LeafClassification {
  std::vector<int> u_leaf;   // unobserved underlying nodes without underlying children
  std::vector<int> nu_leaf;  // everything else in Z∪Y (all Y nodes are nu-leaf)
};

LeafClassification classify_leaves(const SemMeModel& me);

// Merges each u-leaf node's exogenous noise into its measurement error. The
// structure and coefficients are untouched; the result is flagged canonical
// and every u-leaf keeps one (merged) noise term. Idempotent.
SemMeModel canonicalize_me(const SemMeModel& me);

// Linear model with unobserved root causes. Latent nodes (H) have no parents;
// observed nodes (X) may depend on both.
struct SemUrModel {
  WeightedDag dag;

  void validate() const;

  std::vector<int> x_ids() const;
  std::vector<int> h_ids() const;
};

using AnyModel = std::variant<SemMeModel, SemUrModel>;

}  // namespace causamix
