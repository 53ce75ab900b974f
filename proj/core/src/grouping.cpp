#include "causamix/grouping.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "causamix/errors.hpp"

namespace causamix {

namespace {

// Topological order over the condensed group graph, ties broken by the
// smallest member id of the ready groups.
std::vector<Group> order_groups(const std::vector<Group>& groups,
                                const std::vector<std::pair<int, int>>& edges) {
  const int n = static_cast<int>(groups.size());
  std::map<int, int> group_of;
  for (int i = 0; i < n; ++i)
    for (int m : groups[i].members) group_of[m] = i;

  std::vector<std::set<int>> out(n);
  std::vector<int> indeg(n, 0);
  for (const auto& [u, v] : edges) {
    const auto iu = group_of.find(u);
    const auto iv = group_of.find(v);
    if (iu == group_of.end() || iv == group_of.end()) continue;
    if (iu->second == iv->second) continue;
    if (out[iu->second].insert(iv->second).second) ++indeg[iv->second];
  }

  std::set<std::pair<int, int>> ready;  // (smallest member id, group index)
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.emplace(groups[i].members.front(), i);

  std::vector<Group> ordered;
  ordered.reserve(n);
  while (!ready.empty()) {
    const int i = ready.begin()->second;
    ready.erase(ready.begin());
    ordered.push_back(groups[i]);
    for (int j : out[i])
      if (--indeg[j] == 0) ready.emplace(groups[j].members.front(), j);
  }
  if (static_cast<int>(ordered.size()) != n)
    throw Error("grouping produced a cyclic group graph");
  return ordered;
}

std::vector<std::pair<int, int>> underlying_edges(const SemMeModel& me) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : me.dag.edges()) {
    if (me.dag.node(e.src).kind == NodeKind::Measurement) continue;
    if (me.dag.node(e.dst).kind == NodeKind::Measurement) continue;
    edges.emplace_back(e.src, e.dst);
  }
  return edges;
}

std::vector<std::pair<int, int>> all_edges(const SemUrModel& ur) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : ur.dag.edges()) edges.emplace_back(e.src, e.dst);
  return edges;
}

OrderedGrouping assemble(std::vector<Group> groups, GroupingKind kind,
                         MixingKind source,
                         const std::vector<std::pair<int, int>>& edges) {
  for (auto& g : groups) std::sort(g.members.begin(), g.members.end());
  OrderedGrouping grouping;
  grouping.groups = order_groups(groups, edges);
  grouping.kind = kind;
  grouping.domain = GroupingDomain::NodeIds;
  grouping.source = source;
  return grouping;
}

// Shared skeleton of the structural groupings: every nu-leaf (observed)
// node anchors a group, and `host` decides which neighbor, if any, absorbs a
// u-leaf (latent).
template <typename HostFn>
OrderedGrouping group_me(const SemMeModel& me, GroupingKind kind,
                         HostFn host) {
  me.validate();
  const auto leaves = classify_leaves(me);
  std::map<int, Group> anchored;
  for (int v : leaves.nu_leaf) {
    Group g;
    g.members = {v};
    g.center = v;
    anchored.emplace(v, std::move(g));
  }
  std::vector<Group> singles;
  for (int z : leaves.u_leaf) {
    const std::optional<int> h = host(z);
    if (h) {
      anchored.at(*h).members.push_back(z);
    } else {
      Group g;
      g.members = {z};
      singles.push_back(std::move(g));
    }
  }
  std::vector<Group> groups;
  groups.reserve(anchored.size() + singles.size());
  for (auto& [v, g] : anchored) groups.push_back(std::move(g));
  for (auto& g : singles) groups.push_back(std::move(g));
  return assemble(std::move(groups), kind, MixingKind::Me,
                  underlying_edges(me));
}

template <typename HostFn>
OrderedGrouping group_ur(const SemUrModel& ur, GroupingKind kind,
                         HostFn host) {
  ur.validate();
  std::map<int, Group> anchored;
  for (int x : ur.x_ids()) {
    Group g;
    g.members = {x};
    g.center = x;
    anchored.emplace(x, std::move(g));
  }
  std::vector<Group> singles;
  for (int h : ur.h_ids()) {
    const std::optional<int> x = host(h);
    if (x) {
      anchored.at(*x).members.push_back(h);
    } else {
      Group g;
      g.members = {h};
      singles.push_back(std::move(g));
    }
  }
  std::vector<Group> groups;
  groups.reserve(anchored.size() + singles.size());
  for (auto& [x, g] : anchored) groups.push_back(std::move(g));
  for (auto& g : singles) groups.push_back(std::move(g));
  return assemble(std::move(groups), kind, MixingKind::Ur, all_edges(ur));
}

}  // namespace

OrderedGrouping aog_from_structure(const SemMeModel& me) {
  return group_me(me, GroupingKind::Aog, [&](int z) -> std::optional<int> {
    const auto pa = me.underlying_parents(z);
    std::optional<int> host;
    for (int v : pa) {
      const auto anc = me.dag.ancestors(v);
      bool covered = true;
      for (int w : pa) {
        if (w != v && !anc.count(w)) {
          covered = false;
          break;
        }
      }
      if (!covered) continue;
      if (host)
        throw Error("u-leaf " + std::to_string(z) +
                    " is ancestrally covered by two parents");
      host = v;
    }
    return host;
  });
}

OrderedGrouping aog_from_structure(const SemUrModel& ur) {
  return group_ur(ur, GroupingKind::Aog, [&](int h) -> std::optional<int> {
    const auto ch = ur.dag.children(h);
    std::optional<int> host;
    for (int x : ch) {
      const auto de = ur.dag.descendants(x);
      bool covered = true;
      for (int w : ch) {
        if (w != x && !de.count(w)) {
          covered = false;
          break;
        }
      }
      if (!covered) continue;
      if (host)
        throw Error("latent " + std::to_string(h) +
                    " is descendant-covered by two children");
      host = x;
    }
    return host;
  });
}

bool check_condition_me(const SemMeModel& me, int src, int dst) {
  if (!me.dag.has_node(src)) throw UnknownNode("unknown node id " + std::to_string(src));
  if (!me.dag.has_node(dst)) throw UnknownNode("unknown node id " + std::to_string(dst));
  if (!me.is_u_leaf(dst))
    throw NotUleafTarget("node " + std::to_string(dst) + " is not a u-leaf");
  if (!me.dag.has_edge(src, dst))
    throw Error("no edge " + std::to_string(src) + " -> " + std::to_string(dst));

  const auto pa_dst = me.underlying_parents(dst);
  const auto pa_src_v = me.underlying_parents(src);
  const std::set<int> pa_src(pa_src_v.begin(), pa_src_v.end());

  // (a) the u-leaf has a parent, other than src, that is not a parent of src
  for (int w : pa_dst)
    if (w != src && !pa_src.count(w)) return true;

  // (b) some parent of the u-leaf is missed by another child of src
  std::vector<int> siblings;
  for (int c : me.underlying_children(src))
    if (c != dst) siblings.push_back(c);
  if (siblings.empty()) return false;
  std::set<int> common;
  {
    const auto first = me.underlying_parents(siblings.front());
    common.insert(first.begin(), first.end());
  }
  for (size_t i = 1; i < siblings.size(); ++i) {
    const auto pa = me.underlying_parents(siblings[i]);
    const std::set<int> pa_set(pa.begin(), pa.end());
    for (auto it = common.begin(); it != common.end();) {
      if (!pa_set.count(*it))
        it = common.erase(it);
      else
        ++it;
    }
  }
  for (int w : pa_dst)
    if (!common.count(w)) return true;
  return false;
}

bool check_condition_ur(const SemUrModel& ur, int src, int dst) {
  if (!ur.dag.has_node(src)) throw UnknownNode("unknown node id " + std::to_string(src));
  if (!ur.dag.has_node(dst)) throw UnknownNode("unknown node id " + std::to_string(dst));
  if (ur.dag.node(src).kind != NodeKind::LatentRoot)
    throw NotLatentSource("node " + std::to_string(src) + " is not a latent root");
  if (!ur.dag.has_edge(src, dst))
    throw Error("no edge " + std::to_string(src) + " -> " + std::to_string(dst));

  const auto ch_src = ur.dag.children(src);
  const auto ch_dst_v = ur.dag.children(dst);
  const std::set<int> ch_dst(ch_dst_v.begin(), ch_dst_v.end());

  // (a) the latent has a child, other than dst, that is not a child of dst
  for (int w : ch_src)
    if (w != dst && !ch_dst.count(w)) return true;

  // (b) some child of the latent is missed by another parent of dst
  std::vector<int> coparents;
  for (int p : ur.dag.parents(dst))
    if (p != src) coparents.push_back(p);
  if (coparents.empty()) return false;
  std::set<int> common;
  {
    const auto first = ur.dag.children(coparents.front());
    common.insert(first.begin(), first.end());
  }
  for (size_t i = 1; i < coparents.size(); ++i) {
    const auto ch = ur.dag.children(coparents[i]);
    const std::set<int> ch_set(ch.begin(), ch.end());
    for (auto it = common.begin(); it != common.end();) {
      if (!ch_set.count(*it))
        it = common.erase(it);
      else
        ++it;
    }
  }
  for (int w : ch_src)
    if (!common.count(w)) return true;
  return false;
}

OrderedGrouping dog_from_structure(const SemMeModel& me) {
  return group_me(me, GroupingKind::Dog, [&](int z) -> std::optional<int> {
    std::optional<int> host;
    for (int v : me.underlying_parents(z)) {
      if (check_condition_me(me, v, z)) continue;
      if (host)
        throw Error("u-leaf " + std::to_string(z) +
                    " has two unidentifiable incoming edges");
      host = v;
    }
    return host;
  });
}

OrderedGrouping dog_from_structure(const SemUrModel& ur) {
  return group_ur(ur, GroupingKind::Dog, [&](int h) -> std::optional<int> {
    std::optional<int> host;
    for (int x : ur.dag.children(h)) {
      if (check_condition_ur(ur, h, x)) continue;
      if (host)
        throw Error("latent " + std::to_string(h) +
                    " has two unidentifiable outgoing edges");
      host = x;
    }
    return host;
  });
}

OrderedGrouping aog_from_mixing(const SupportPattern& supp) {
  const bool ur = supp.kind == MixingKind::Ur;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  if (ur)
    mask = supp.mask.transpose();
  else
    mask = supp.mask;
  const int nr = static_cast<int>(mask.rows());
  const int nc = static_cast<int>(mask.cols());

  std::vector<int> n_orig(nr, 0);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c)
      if (mask(r, c)) ++n_orig[r];
  std::vector<int> cnt = n_orig;

  std::vector<char> row_alive(nr, 1), col_alive(nc, 1);
  int alive = nr;
  std::vector<Group> flat;

  while (alive > 0) {
    int pick = -1;
    for (int r = 0; r < nr; ++r)
      if (row_alive[r] && cnt[r] == 1 && (pick < 0 || n_orig[r] < n_orig[pick]))
        pick = r;
    if (pick < 0)
      throw NoValidRow("no remaining row has exactly one nonzero entry");

    int col = -1;
    for (int c = 0; c < nc; ++c)
      if (col_alive[c] && mask(pick, c)) {
        col = c;
        break;
      }

    std::vector<int> mains, extras;
    for (int r = 0; r < nr; ++r) {
      if (!row_alive[r] || cnt[r] != 1 || !mask(r, col)) continue;
      (n_orig[r] == n_orig[pick] ? mains : extras).push_back(r);
    }

    Group main;
    main.members = mains;
    main.paired = col;
    if (mains.size() == 1) main.center = mains.front();
    flat.push_back(std::move(main));
    for (int r : extras) {
      Group g;
      g.members = {r};
      flat.push_back(std::move(g));
    }

    for (int r : mains) row_alive[r] = 0;
    for (int r : extras) row_alive[r] = 0;
    alive -= static_cast<int>(mains.size() + extras.size());
    col_alive[col] = 0;
    for (int r = 0; r < nr; ++r)
      if (row_alive[r] && mask(r, col)) --cnt[r];
  }

  if (ur) std::reverse(flat.begin(), flat.end());
  OrderedGrouping grouping;
  grouping.groups = std::move(flat);
  grouping.kind = GroupingKind::Aog;
  grouping.domain = GroupingDomain::Positions;
  grouping.source = ur ? MixingKind::Ur : MixingKind::Me;
  return grouping;
}

std::vector<std::vector<int>> enumerate_class(const OrderedGrouping& grouping,
                                              long long cap) {
  if (cap < 1) throw Error("class cap must be positive");
  long long total = 1;
  for (const auto& g : grouping.groups) {
    const auto size = static_cast<long long>(g.members.size());
    if (size == 0) throw Error("grouping contains an empty group");
    if (total > cap / size)
      throw ClassTooLarge("equivalence class exceeds cap of " +
                          std::to_string(cap));
    total *= size;
  }

  const size_t n = grouping.groups.size();
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<size_t>(total));
  std::vector<size_t> idx(n, 0);
  while (true) {
    std::vector<int> assignment(n);
    for (size_t i = 0; i < n; ++i)
      assignment[i] = grouping.groups[i].members[idx[i]];
    out.push_back(std::move(assignment));
    size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < grouping.groups[i].members.size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

long long class_size(const OrderedGrouping& grouping) {
  const long long kMax = std::numeric_limits<long long>::max();
  long long total = 1;
  for (const auto& g : grouping.groups) {
    const auto size = static_cast<long long>(g.members.size());
    if (size == 0) return 0;
    if (total > kMax / size) return kMax;
    total *= size;
  }
  return total;
}

std::pair<MixingMatrix, double> prune_until_valid(const MixingMatrix& mix) {
  MixingMatrix pruned = mix;
  const bool ur = mix.kind == MixingKind::Ur;
  auto& v = pruned.values;

  struct Entry {
    double mag;
    int r, c;
  };
  std::vector<Entry> entries;
  const int lines = static_cast<int>(ur ? v.cols() : v.rows());
  std::vector<int> line_cnt(lines, 0);
  for (int r = 0; r < v.rows(); ++r)
    for (int c = 0; c < v.cols(); ++c)
      if (v(r, c) != 0.0) {
        entries.push_back({std::abs(v(r, c)), r, c});
        ++line_cnt[ur ? c : r];
      }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.mag, a.r, a.c) < std::tie(b.mag, b.r, b.c);
  });

  double worst = 0.0;
  size_t next = 0;
  while (true) {
    try {
      aog_from_mixing(support(pruned, 0.0));
      return {pruned, worst};
    } catch (const NoValidRow&) {
    }
    bool zeroed = false;
    while (next < entries.size() && !zeroed) {
      const Entry e = entries[next++];
      const int line = ur ? e.c : e.r;
      if (line_cnt[line] <= 1) continue;  // keep the line's last nonzero
      v(e.r, e.c) = 0.0;
      --line_cnt[line];
      worst = std::max(worst, e.mag);
      zeroed = true;
    }
    if (!zeroed)
      throw Unprunable("no entry can be zeroed without emptying a row");
  }
}

}  // namespace causamix
