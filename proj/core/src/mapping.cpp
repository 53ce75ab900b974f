#include "causamix/mapping.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "causamix/constants.hpp"
#include "causamix/errors.hpp"
#include "causamix/mixing.hpp"

namespace causamix {

ObservabilityChoice ObservabilityChoice::from_bitstring(const std::string& bits) {
  ObservabilityChoice choice;
  choice.to_z.reserve(bits.size());
  for (char c : bits) {
    if (c == '0')
      choice.to_z.push_back(false);
    else if (c == '1')
      choice.to_z.push_back(true);
    else
      throw Error("choice bitstring may only contain '0' and '1'");
  }
  return choice;
}

std::string ObservabilityChoice::to_bitstring() const {
  std::string bits;
  bits.reserve(to_z.size());
  for (bool b : to_z) bits.push_back(b ? '1' : '0');
  return bits;
}

std::vector<int> choice_slots(const SemUrModel& ur) {
  std::vector<int> slots;
  for (int id : ur.x_ids())
    if (!ur.dag.parents(id).empty()) slots.push_back(id);
  return slots;
}

std::vector<ObservabilityChoice> all_choices(int n_slots) {
  if (n_slots < 0 || n_slots > 20)
    throw Error("refusing to enumerate choices for " +
                std::to_string(n_slots) + " slots");
  std::vector<ObservabilityChoice> choices;
  choices.reserve(1u << n_slots);
  for (unsigned long long i = 0; i < (1ull << n_slots); ++i) {
    ObservabilityChoice c;
    c.to_z.resize(n_slots);
    for (int j = 0; j < n_slots; ++j)
      c.to_z[j] = (i >> (n_slots - 1 - j)) & 1u;
    choices.push_back(std::move(c));
  }
  return choices;
}

SemMeModel map_ur_to_me(const SemUrModel& ur, const ObservabilityChoice& choice) {
  ur.validate();
  const auto slots = choice_slots(ur);
  if (choice.to_z.size() != slots.size())
    throw ChoiceLengthMismatch("choice has " + std::to_string(choice.to_z.size()) +
                               " flags but the model has " +
                               std::to_string(slots.size()) +
                               " non-root observed nodes");
  std::map<int, bool> slot_to_z;
  for (size_t i = 0; i < slots.size(); ++i) slot_to_z[slots[i]] = choice.to_z[i];

  SemMeModel me;
  for (int id : ur.dag.node_ids()) {
    const Node& n = ur.dag.node(id);
    NodeKind kind;
    if (n.kind == NodeKind::LatentRoot)
      kind = NodeKind::UnobservedUnderlying;
    else if (ur.dag.parents(id).empty())
      kind = NodeKind::ObservedUnderlying;
    else
      kind = slot_to_z.at(id) ? NodeKind::UnobservedUnderlying
                              : NodeKind::ObservedUnderlying;
    const std::string prefix =
        kind == NodeKind::UnobservedUnderlying ? "Z:" : "Y:";
    me.dag.add_node(id, prefix + n.name, kind);
  }
  for (const Edge& e : ur.dag.edges()) me.dag.set_edge(e.dst, e.src, e.weight);
  attach_measurements(me);
  me.canonical = true;
  const auto leaves = me.u_leaf_ids();
  me.u_leaf_noise_ids.insert(leaves.begin(), leaves.end());
  me.validate();
  return me;
}

SemUrModel map_me_to_ur(const SemMeModel& me) {
  me.validate();
  if (!me.canonical)
    throw NotCanonical("only canonical models map to unobserved-root form");
  SemUrModel ur;
  for (int id : me.underlying_ids()) {
    const Node& n = me.dag.node(id);
    const bool latent = me.is_u_leaf(id);
    ur.dag.add_node(id, (latent ? "H:" : "X:") + n.name,
                    latent ? NodeKind::LatentRoot : NodeKind::ObservedUr);
  }
  for (const Edge& e : me.dag.edges()) {
    if (me.dag.node(e.src).kind == NodeKind::Measurement ||
        me.dag.node(e.dst).kind == NodeKind::Measurement)
      continue;
    ur.dag.set_edge(e.dst, e.src, e.weight);
  }
  ur.validate();
  return ur;
}

namespace {

std::vector<double> sorted_column(const Eigen::MatrixXd& m, int c) {
  std::vector<double> v(m.rows());
  for (int r = 0; r < m.rows(); ++r) v[r] = m(r, c);
  std::sort(v.begin(), v.end());
  return v;
}

bool within(const std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kTransposeTol) return false;
  return true;
}

// Kuhn's augmenting-path bipartite matching.
bool augment(int r, const std::vector<std::vector<int>>& adj,
             std::vector<int>& match_of_b, std::vector<char>& visited) {
  for (int b : adj[r]) {
    if (visited[b]) continue;
    visited[b] = 1;
    if (match_of_b[b] < 0 || augment(match_of_b[b], adj, match_of_b, visited)) {
      match_of_b[b] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

TransposeMatch verify_transpose(const SemUrModel& ur, const SemMeModel& me) {
  const MixingMatrix wme = mixing_me(me);
  const MixingMatrix wur = mixing_ur(ur);
  const Eigen::MatrixXd& a = wme.values;
  const Eigen::MatrixXd b = wur.values.transpose();
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NoPermutationFound(
        "mixing matrices have incompatible shapes: " + std::to_string(a.rows()) +
        "x" + std::to_string(a.cols()) + " vs transposed " +
        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const int n = static_cast<int>(a.rows());
  const int q = static_cast<int>(a.cols());

  std::vector<std::vector<double>> fp_a(q), fp_b(q);
  for (int c = 0; c < q; ++c) {
    fp_a[c] = sorted_column(a, c);
    fp_b[c] = sorted_column(b, c);
  }
  // cand[j]: columns of the ME matrix that could sit at position j, where
  // position j lines up with column j of the transposed UR matrix.
  std::vector<std::vector<int>> cand(q);
  for (int j = 0; j < q; ++j)
    for (int c = 0; c < q; ++c)
      if (within(fp_a[c], fp_b[j])) cand[j].push_back(c);

  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return cand[x].size() < cand[y].size();
  });

  std::vector<int> alpha(q, -1);
  std::vector<char> used(q, 0);
  std::vector<int> beta(n, -1);

  auto match_rows = [&]() {
    std::vector<std::vector<int>> adj(n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        bool ok = true;
        for (int j = 0; j < q && ok; ++j)
          ok = std::abs(a(r, alpha[j]) - b(s, j)) <= kTransposeTol;
        if (ok) adj[r].push_back(s);
      }
    std::vector<int> match_of_b(n, -1);
    for (int r = 0; r < n; ++r) {
      std::vector<char> visited(n, 0);
      if (!augment(r, adj, match_of_b, visited)) return false;
    }
    for (int s = 0; s < n; ++s) beta[match_of_b[s]] = s;
    return true;
  };

  std::function<bool(int)> assign = [&](int k) -> bool {
    if (k == q) return match_rows();
    const int j = order[k];
    for (int c : cand[j]) {
      if (used[c]) continue;
      alpha[j] = c;
      used[c] = 1;
      if (assign(k + 1)) return true;
      used[c] = 0;
    }
    alpha[j] = -1;
    return false;
  };

  if (!assign(0))
    throw NoPermutationFound("no column pairing makes the mixing matrices transposes");
  return {alpha, beta};
}

}  // namespace causamix
