#include "causamix/model.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace causamix {

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::ObservedUnderlying:
      return "observed_underlying";
    case NodeKind::UnobservedUnderlying:
      return "unobserved_underlying";
    case NodeKind::Measurement:
      return "measurement";
    case NodeKind::ObservedUr:
      return "observed";
    case NodeKind::LatentRoot:
      return "latent_root";
  }
  throw Error("unhandled node kind");
}

NodeKind node_kind_from_string(const std::string& text) {
  if (text == "observed_underlying") return NodeKind::ObservedUnderlying;
  if (text == "unobserved_underlying") return NodeKind::UnobservedUnderlying;
  if (text == "measurement") return NodeKind::Measurement;
  if (text == "observed") return NodeKind::ObservedUr;
  if (text == "latent_root") return NodeKind::LatentRoot;
  throw Error("unknown node kind: " + text);
}

void WeightedDag::add_node(int id, std::string name, NodeKind kind) {
  if (id < 0) throw Error("node id must be non-negative, got " + std::to_string(id));
  if (nodes_.count(id)) throw Error("duplicate node id " + std::to_string(id));
  nodes_[id] = Node{id, std::move(name), kind};
  out_[id];
  in_[id];
}

const Node& WeightedDag::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode("no node with id " + std::to_string(id));
  return it->second;
}

void WeightedDag::require_node(int id) const {
  if (!nodes_.count(id)) throw UnknownNode("no node with id " + std::to_string(id));
}

bool WeightedDag::reaches(int from, int to) const {
  if (from == to) return true;
  std::deque<int> frontier{from};
  std::set<int> seen{from};
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (const auto& [child, w] : out_.at(v)) {
      (void)w;
      if (child == to) return true;
      if (seen.insert(child).second) frontier.push_back(child);
    }
  }
  return false;
}

void WeightedDag::set_edge(int src, int dst, double weight) {
  require_node(src);
  require_node(dst);
  if (src == dst) throw CycleDetected("self-loop on node " + std::to_string(src));
  if (weight == 0.0) {
    out_[src].erase(dst);
    in_[dst].erase(src);
    return;
  }
  if (!out_.at(src).count(dst) && reaches(dst, src)) {
    throw CycleDetected("edge " + std::to_string(src) + " -> " + std::to_string(dst) +
                        " would close a cycle");
  }
  out_[src][dst] = weight;
  in_[dst][src] = weight;
}

bool WeightedDag::has_edge(int src, int dst) const {
  auto it = out_.find(src);
  return it != out_.end() && it->second.count(dst) > 0;
}

double WeightedDag::weight(int src, int dst) const {
  require_node(src);
  require_node(dst);
  auto it = out_.at(src).find(dst);
  return it == out_.at(src).end() ? 0.0 : it->second;
}

std::vector<int> WeightedDag::node_ids() const {
  std::vector<int> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_) {
    (void)node;
    ids.push_back(id);
  }
  return ids;
}

std::vector<Edge> WeightedDag::edges() const {
  std::vector<Edge> result;
  for (const auto& [src, targets] : out_) {
    for (const auto& [dst, w] : targets) result.push_back(Edge{src, dst, w});
  }
  return result;
}

int WeightedDag::num_edges() const {
  int n = 0;
  for (const auto& [src, targets] : out_) {
    (void)src;
    n += static_cast<int>(targets.size());
  }
  return n;
}

std::vector<int> WeightedDag::parents(int id) const {
  require_node(id);
  std::vector<int> result;
  for (const auto& [p, w] : in_.at(id)) {
    (void)w;
    result.push_back(p);
  }
  return result;
}

std::vector<int> WeightedDag::children(int id) const {
  require_node(id);
  std::vector<int> result;
  for (const auto& [c, w] : out_.at(id)) {
    (void)w;
    result.push_back(c);
  }
  return result;
}

std::set<int> WeightedDag::ancestors(int id) const {
  require_node(id);
  std::set<int> result;
  std::deque<int> frontier{id};
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (const auto& [p, w] : in_.at(v)) {
      (void)w;
      if (result.insert(p).second) frontier.push_back(p);
    }
  }
  result.erase(id);
  return result;
}

std::set<int> WeightedDag::descendants(int id) const {
  require_node(id);
  std::set<int> result;
  std::deque<int> frontier{id};
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (const auto& [c, w] : out_.at(v)) {
      (void)w;
      if (result.insert(c).second) frontier.push_back(c);
    }
  }
  result.erase(id);
  return result;
}

std::vector<int> WeightedDag::topological_order() const {
  std::map<int, int> in_degree;
  for (const auto& [id, preds] : in_) in_degree[id] = static_cast<int>(preds.size());
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (const auto& [id, deg] : in_degree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<int> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const auto& [c, w] : out_.at(v)) {
      (void)w;
      if (--in_degree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != nodes_.size()) throw CycleDetected("graph contains a cycle");
  return order;
}

namespace {

std::vector<int> ids_of_kind(const WeightedDag& dag, NodeKind kind) {
  std::vector<int> result;
  for (int id : dag.node_ids()) {
    if (dag.node(id).kind == kind) result.push_back(id);
  }
  return result;
}

}  // namespace

void SemMeModel::validate() const {
  std::set<int> u_seen;
  for (int id : dag.node_ids()) {
    NodeKind kind = dag.node(id).kind;
    if (kind != NodeKind::ObservedUnderlying && kind != NodeKind::UnobservedUnderlying &&
        kind != NodeKind::Measurement) {
      throw NotCanonical("node " + std::to_string(id) +
                         " has a kind that does not belong in a measurement-error model");
    }
  }
  for (const auto& [z, u] : measurement_of) {
    if (!dag.has_node(z) || dag.node(z).kind != NodeKind::UnobservedUnderlying) {
      throw NotCanonical("measurement maps non-Z node " + std::to_string(z));
    }
    if (!dag.has_node(u) || dag.node(u).kind != NodeKind::Measurement) {
      throw NotCanonical("measurement target " + std::to_string(u) + " is not a measurement node");
    }
    if (!u_seen.insert(u).second) {
      throw NotCanonical("measurement node " + std::to_string(u) + " is shared");
    }
    if (dag.weight(z, u) != 1.0) {
      throw NotCanonical("measurement edge " + std::to_string(z) + " -> " + std::to_string(u) +
                         " must have weight 1");
    }
    if (dag.parents(u).size() != 1) {
      throw NotCanonical("measurement node " + std::to_string(u) + " must have exactly one parent");
    }
    if (!dag.children(u).empty()) {
      throw NotCanonical("measurement node " + std::to_string(u) + " must be childless");
    }
  }
  for (int z : z_ids()) {
    if (!measurement_of.count(z)) {
      throw NotCanonical("unobserved node " + std::to_string(z) + " has no measurement");
    }
  }
  for (int u : ids_of_kind(dag, NodeKind::Measurement)) {
    if (!u_seen.count(u)) {
      throw NotCanonical("measurement node " + std::to_string(u) + " is not attached to any Z");
    }
  }
  for (int y : y_ids()) {
    for (int c : dag.children(y)) {
      if (dag.node(c).kind == NodeKind::Measurement) {
        throw NotCanonical("observed node " + std::to_string(y) + " has a measurement child");
      }
    }
  }
  for (int z : u_leaf_noise_ids) {
    if (!dag.has_node(z) || !is_u_leaf(z)) {
      throw NotCanonical("noise id " + std::to_string(z) + " is not a u-leaf");
    }
  }
}

std::vector<int> SemMeModel::underlying_ids() const {
  std::vector<int> result;
  for (int id : dag.node_ids()) {
    NodeKind kind = dag.node(id).kind;
    if (kind == NodeKind::ObservedUnderlying || kind == NodeKind::UnobservedUnderlying) {
      result.push_back(id);
    }
  }
  return result;
}

std::vector<int> SemMeModel::z_ids() const {
  return ids_of_kind(dag, NodeKind::UnobservedUnderlying);
}

std::vector<int> SemMeModel::y_ids() const {
  return ids_of_kind(dag, NodeKind::ObservedUnderlying);
}

std::vector<int> SemMeModel::u_ids() const {
  std::vector<int> result;
  for (const auto& [z, u] : measurement_of) {
    (void)z;
    result.push_back(u);
  }
  return result;
}

bool SemMeModel::is_u_leaf(int z_id) const {
  if (dag.node(z_id).kind != NodeKind::UnobservedUnderlying) return false;
  return underlying_children(z_id).empty();
}

std::vector<int> SemMeModel::u_leaf_ids() const {
  std::vector<int> result;
  for (int z : z_ids()) {
    if (is_u_leaf(z)) result.push_back(z);
  }
  return result;
}

std::vector<int> SemMeModel::underlying_children(int id) const {
  std::vector<int> result;
  for (int c : dag.children(id)) {
    if (dag.node(c).kind != NodeKind::Measurement) result.push_back(c);
  }
  return result;
}

std::vector<int> SemMeModel::underlying_parents(int id) const {
  std::vector<int> result;
  for (int p : dag.parents(id)) {
    if (dag.node(p).kind != NodeKind::Measurement) result.push_back(p);
  }
  return result;
}

LeafClassification classify_leaves(const SemMeModel& me) {
  LeafClassification result;
  for (int id : me.underlying_ids()) {
    if (me.is_u_leaf(id)) {
      result.u_leaf.push_back(id);
    } else {
      result.nu_leaf.push_back(id);
    }
  }
  return result;
}

SemMeModel canonicalize_me(const SemMeModel& me) {
  SemMeModel result = me;
  if (!result.canonical) {
    result.canonical = true;
    std::vector<int> leaves = result.u_leaf_ids();
    result.u_leaf_noise_ids = std::set<int>(leaves.begin(), leaves.end());
  }
  return result;
}

void attach_measurements(SemMeModel& model) {
  std::vector<int> zs = model.z_ids();
  int offset = 0;
  for (int id : model.dag.node_ids()) offset = std::max(offset, id + 1);
  for (int z : zs) {
    if (model.measurement_of.count(z)) continue;
    int u = offset + z;
    while (model.dag.has_node(u)) ++u;
    model.dag.add_node(u, "U" + std::to_string(z), NodeKind::Measurement);
    model.dag.set_edge(z, u, 1.0);
    model.measurement_of[z] = u;
  }
}

void SemUrModel::validate() const {
  for (int id : dag.node_ids()) {
    NodeKind kind = dag.node(id).kind;
    if (kind != NodeKind::ObservedUr && kind != NodeKind::LatentRoot) {
      throw NotCanonical("node " + std::to_string(id) +
                         " has a kind that does not belong in an unobserved-root model");
    }
    if (kind == NodeKind::LatentRoot && !dag.parents(id).empty()) {
      throw NotCanonical("latent node " + std::to_string(id) + " must be a root");
    }
  }
}

std::vector<int> SemUrModel::x_ids() const {
  return ids_of_kind(dag, NodeKind::ObservedUr);
}

std::vector<int> SemUrModel::h_ids() const {
  return ids_of_kind(dag, NodeKind::LatentRoot);
}

}  // namespace causamix
