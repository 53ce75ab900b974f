#include "causamix/faithfulness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <vector>

#include "causamix/errors.hpp"
#include "causamix/grouping.hpp"
#include "causamix/mixing.hpp"

namespace causamix {

namespace {

std::string join_names(const WeightedDag& dag, const std::vector<int>& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ",";
    out += dag.node(ids[i]).name;
  }
  return out;
}

bool is_subset(const std::vector<int>& small, const std::set<int>& big) {
  for (int v : small) {
    if (big.count(v) == 0) return false;
  }
  return true;
}

// Visits k-combinations of {0..n-1} in lexicographic order until fn returns
// true.
template <class Fn>
void combinations(int n, int k, Fn&& fn) {
  if (k <= 0 || k > n) return;
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    if (fn(c)) return;
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

bool dependent(const Eigen::MatrixXd& mat, const Eigen::VectorXd& t) {
  double t_norm = t.norm();
  if (t_norm == 0.0) return true;
  Eigen::VectorXd x = mat.colPivHouseholderQr().solve(t);
  return (mat * x - t).norm() < kDependenceTol * t_norm;
}

// Shared facts for the dependence checks, written in measurement-error terms.
// For unobserved-root models the duals are loaded instead: `up` holds
// descendants, `direct` children, `special` the latent roots, and effect
// vectors are indexed by descendants rather than ancestors.
struct BContext {
  const WeightedDag* dag = nullptr;
  std::vector<int> vars;                  // variables in scope, ascending
  std::map<int, std::vector<int>> up;     // ancestors (descendants), sorted
  std::map<int, std::set<int>> direct;    // parents (children)
  std::set<int> special;                  // u-leaf nodes (latent roots)
  std::map<int, int> group_of;            // structural AOG group index
  bool dual = false;                      // false: ME, true: UR
  const TotalEffects* te = nullptr;

  // Component of the effect vector of `vec_node` at index node `idx_node`.
  double entry(int idx_node, int vec_node) const {
    return dual ? te->of(idx_node, vec_node) : te->of(vec_node, idx_node);
  }

  // Upstream nodes plus the special nodes fully anchored in them.
  std::vector<int> possible(int v) const {
    std::vector<int> out = up.at(v);
    std::set<int> up_set(out.begin(), out.end());
    for (int s : special) {
      if (s == v || up_set.count(s) > 0) continue;
      std::vector<int> d(direct.at(s).begin(), direct.at(s).end());
      if (is_subset(d, up_set)) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

void load_group_index(const OrderedGrouping& grouping,
                      std::map<int, int>* group_of) {
  for (size_t g = 0; g < grouping.groups.size(); ++g) {
    for (int m : grouping.groups[g].members) {
      (*group_of)[m] = static_cast<int>(g);
    }
  }
}

BContext context_me(const SemMeModel& me, const TotalEffects& te) {
  BContext ctx;
  ctx.dag = &me.dag;
  ctx.vars = me.underlying_ids();
  for (int v : ctx.vars) {
    std::set<int> anc = me.dag.ancestors(v);
    ctx.up[v] = std::vector<int>(anc.begin(), anc.end());
    std::vector<int> pa = me.underlying_parents(v);
    ctx.direct[v] = std::set<int>(pa.begin(), pa.end());
  }
  for (int z : me.u_leaf_ids()) ctx.special.insert(z);
  load_group_index(aog_from_structure(me), &ctx.group_of);
  ctx.dual = false;
  ctx.te = &te;
  return ctx;
}

BContext context_ur(const SemUrModel& ur, const TotalEffects& te) {
  BContext ctx;
  ctx.dag = &ur.dag;
  ctx.vars = ur.dag.node_ids();
  for (int v : ctx.vars) {
    std::set<int> des = ur.dag.descendants(v);
    ctx.up[v] = std::vector<int>(des.begin(), des.end());
    std::vector<int> ch = ur.dag.children(v);
    ctx.direct[v] = std::set<int>(ch.begin(), ch.end());
  }
  for (int h : ur.h_ids()) ctx.special.insert(h);
  load_group_index(aog_from_structure(ur), &ctx.group_of);
  ctx.dual = true;
  ctx.te = &te;
  return ctx;
}

// Scans subsets of `cand` by increasing size for one whose span absorbs `t`.
// Subsets of the exempt size whose special members are anchored inside
// `anchor` are skipped; when every non-anchored special member sits in the
// variable's own group the finding is downgraded to a warning. Returns true
// when a violation was recorded.
bool scan_subsets(const BContext& ctx, const std::vector<int>& idx,
                  const Eigen::VectorXd& t, const std::vector<int>& cand,
                  int bound, const std::set<int>& anchor, int variable,
                  int partner, const std::string& part,
                  FaithfulnessReport* report) {
  int n = static_cast<int>(cand.size());
  Eigen::MatrixXd cols(idx.size(), n);
  for (int c = 0; c < n; ++c) {
    for (size_t r = 0; r < idx.size(); ++r) {
      cols(r, c) = ctx.entry(idx[r], cand[c]);
    }
  }
  bool warned = false;
  bool violated = false;
  int kmax = std::min(bound, n);
  for (int k = 1; k <= kmax && !violated; ++k) {
    combinations(n, k, [&](const std::vector<int>& pick) {
      Eigen::MatrixXd mat(idx.size(), k);
      for (int c = 0; c < k; ++c) mat.col(c) = cols.col(pick[c]);
      if (!dependent(mat, t)) return false;
      std::vector<int> witnesses;
      for (int c : pick) witnesses.push_back(cand[c]);
      if (k == bound) {
        bool genuine = false;
        bool co_group = false;
        for (int w : witnesses) {
          if (ctx.special.count(w) == 0) continue;
          std::vector<int> dw(ctx.direct.at(w).begin(), ctx.direct.at(w).end());
          if (is_subset(dw, anchor)) continue;
          if (ctx.group_of.at(w) == ctx.group_of.at(variable)) {
            co_group = true;
          } else {
            genuine = true;
          }
        }
        if (!genuine && !co_group) return false;  // exempt subset
        if (!genuine) {
          if (!warned) {
            std::ostringstream msg;
            msg << "(" << part << ") " << ctx.dag->node(variable).name
                << ": dependence witnessed only by its own group members ("
                << join_names(*ctx.dag, witnesses) << "), not counted";
            report->warnings.push_back(msg.str());
            warned = true;
          }
          return false;
        }
      }
      Violation v;
      v.part = part;
      v.variable = variable;
      v.partner = partner;
      v.witnesses = witnesses;
      std::ostringstream msg;
      msg << "effect vector of " << ctx.dag->node(variable).name;
      if (partner >= 0) msg << " (without " << ctx.dag->node(partner).name << ")";
      msg << " lies in the span of {" << join_names(*ctx.dag, witnesses) << "}";
      v.detail = msg.str();
      report->violations.push_back(v);
      violated = true;
      return true;
    });
  }
  return violated;
}

void check_b(const BContext& ctx, int cap, FaithfulnessReport* report) {
  for (int v : ctx.vars) {
    const std::vector<int>& idx = ctx.up.at(v);
    if (idx.empty()) continue;
    int bound = static_cast<int>(ctx.direct.at(v).size());
    if (bound == 0) continue;
    if (bound > cap) {
      throw CombinatorialCap("dependence check at " + ctx.dag->node(v).name +
                             " needs subsets of size " + std::to_string(bound) +
                             ", cap is " + std::to_string(cap));
    }
    std::vector<int> cand = ctx.possible(v);
    if (cand.empty()) continue;
    Eigen::VectorXd t(idx.size());
    for (size_t r = 0; r < idx.size(); ++r) t(r) = ctx.entry(idx[r], v);
    scan_subsets(ctx, idx, t, cand, bound, ctx.direct.at(v), v, -1,
                 ctx.dual ? "b1-ur" : "b1", report);
  }
  for (int v : ctx.vars) {
    if (ctx.special.count(v) == 0) continue;
    for (int j : ctx.direct.at(v)) {
      std::vector<int> idx;
      for (int a : ctx.up.at(v)) {
        if (a != j) idx.push_back(a);
      }
      if (idx.empty()) continue;
      std::set<int> anchor = ctx.direct.at(j);
      anchor.insert(ctx.direct.at(v).begin(), ctx.direct.at(v).end());
      int bound = static_cast<int>(anchor.size()) - 1;
      if (bound <= 0) continue;
      if (bound > cap) {
        throw CombinatorialCap("dependence check at " + ctx.dag->node(v).name +
                               " / " + ctx.dag->node(j).name +
                               " needs subsets of size " +
                               std::to_string(bound) + ", cap is " +
                               std::to_string(cap));
      }
      std::vector<int> cand = ctx.possible(j);
      if (cand.empty()) continue;
      Eigen::VectorXd t(idx.size());
      for (size_t r = 0; r < idx.size(); ++r) t(r) = ctx.entry(idx[r], v);
      scan_subsets(ctx, idx, t, cand, bound, anchor, v, j,
                   ctx.dual ? "b2-ur" : "b2", report);
    }
  }
  report->passed = report->violations.empty();
}

void check_a_impl(const WeightedDag& dag, const std::vector<int>& vars,
                  FaithfulnessReport* report) {
  TotalEffects te = total_effects(dag);
  for (int v : vars) {
    for (int a : dag.ancestors(v)) {
      double t = te.of(v, a);
      if (std::abs(t) > kExactZeroTol) continue;
      Violation viol;
      viol.part = "a";
      viol.variable = v;
      viol.partner = a;
      std::ostringstream msg;
      msg << "total effect of " << dag.node(a).name << " on "
          << dag.node(v).name << " vanishes (" << t << ")";
      viol.detail = msg.str();
      report->violations.push_back(viol);
    }
  }
  report->passed = report->violations.empty();
}

// Unit-capacity max flow (shortest augmenting paths); graphs here are tiny.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : adj_(n) {}

  void add_edge(int u, int v, int cap) {
    adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, 0, static_cast<int>(adj_[u].size()) - 1});
  }

  int run(int s, int t) {
    int total = 0;
    while (true) {
      std::vector<std::pair<int, int>> from(adj_.size(), {-1, -1});
      std::queue<int> q;
      q.push(s);
      from[s] = {s, -1};
      while (!q.empty() && from[t].first < 0) {
        int u = q.front();
        q.pop();
        for (size_t e = 0; e < adj_[u].size(); ++e) {
          const Arc& arc = adj_[u][e];
          if (arc.cap <= 0 || from[arc.to].first >= 0) continue;
          from[arc.to] = {u, static_cast<int>(e)};
          q.push(arc.to);
        }
      }
      if (from[t].first < 0) return total;
      int botton = std::numeric_limits<int>::max();
      for (int v = t; v != s;) {
        auto [u, e] = from[v];
        botton = std::min(botton, adj_[u][e].cap);
        v = u;
      }
      for (int v = t; v != s;) {
        auto [u, e] = from[v];
        adj_[u][e].cap -= botton;
        adj_[adj_[u][e].to][adj_[u][e].rev].cap += botton;
        v = u;
      }
      total += botton;
    }
  }

 private:
  struct Arc {
    int to;
    int cap;
    int rev;
  };
  std::vector<std::vector<Arc>> adj_;
};

int min_vertex_cut(const WeightedDag& dag, const std::vector<int>& all,
                   const std::map<int, int>& pos, const std::vector<int>& from,
                   const std::vector<int>& to) {
  constexpr int kInf = 1 << 29;
  int n = static_cast<int>(all.size());
  MaxFlow flow(2 * n + 2);
  int s = 2 * n;
  int t = 2 * n + 1;
  for (int i = 0; i < n; ++i) flow.add_edge(2 * i, 2 * i + 1, 1);
  for (const Edge& e : dag.edges()) {
    flow.add_edge(2 * pos.at(e.src) + 1, 2 * pos.at(e.dst), kInf);
  }
  for (int j : from) flow.add_edge(s, 2 * pos.at(j), kInf);
  for (int k : to) flow.add_edge(2 * pos.at(k) + 1, t, kInf);
  return flow.run(s, t);
}

int numeric_rank(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > kDependenceTol * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace

FaithfulnessReport merge(const FaithfulnessReport& a,
                         const FaithfulnessReport& b) {
  FaithfulnessReport out = a;
  out.violations.insert(out.violations.end(), b.violations.begin(),
                        b.violations.end());
  out.warnings.insert(out.warnings.end(), b.warnings.begin(),
                      b.warnings.end());
  out.passed = out.violations.empty();
  return out;
}

FaithfulnessReport check_faithfulness_a(const SemMeModel& me) {
  me.validate();
  FaithfulnessReport report;
  check_a_impl(me.dag, me.underlying_ids(), &report);
  return report;
}

FaithfulnessReport check_faithfulness_a(const SemUrModel& ur) {
  ur.validate();
  FaithfulnessReport report;
  check_a_impl(ur.dag, ur.dag.node_ids(), &report);
  return report;
}

FaithfulnessReport check_faithfulness_b(const SemMeModel& me, int cap) {
  me.validate();
  FaithfulnessReport report;
  TotalEffects te = total_effects(me.dag);
  check_b(context_me(me, te), cap, &report);
  return report;
}

FaithfulnessReport check_faithfulness_b(const SemUrModel& ur, int cap) {
  ur.validate();
  FaithfulnessReport report;
  TotalEffects te = total_effects(ur.dag);
  check_b(context_ur(ur, te), cap, &report);
  return report;
}

FaithfulnessReport check_faithfulness(const SemMeModel& me, int cap) {
  return merge(check_faithfulness_a(me), check_faithfulness_b(me, cap));
}

FaithfulnessReport check_faithfulness(const SemUrModel& ur, int cap) {
  return merge(check_faithfulness_a(ur), check_faithfulness_b(ur, cap));
}

FaithfulnessReport check_bottleneck_faithfulness(const SemUrModel& ur,
                                                 int cap) {
  ur.validate();
  std::vector<int> all = ur.dag.node_ids();
  if (static_cast<int>(all.size()) > cap) {
    throw CapExceeded("bottleneck check over " + std::to_string(all.size()) +
                      " nodes, cap is " + std::to_string(cap));
  }
  std::map<int, int> pos;
  for (size_t i = 0; i < all.size(); ++i) pos[all[i]] = static_cast<int>(i);
  TotalEffects te = total_effects(ur.dag);
  std::vector<int> xs = ur.x_ids();
  std::vector<int> srcs = ur.h_ids();
  srcs.insert(srcs.end(), xs.begin(), xs.end());

  FaithfulnessReport report;
  for (unsigned jm = 1; jm < (1u << srcs.size()); ++jm) {
    std::vector<int> j_set;
    for (size_t i = 0; i < srcs.size(); ++i) {
      if (jm & (1u << i)) j_set.push_back(srcs[i]);
    }
    for (unsigned km = 1; km < (1u << xs.size()); ++km) {
      std::vector<int> k_set;
      for (size_t i = 0; i < xs.size(); ++i) {
        if (km & (1u << i)) k_set.push_back(xs[i]);
      }
      Eigen::MatrixXd block(k_set.size(), j_set.size());
      for (size_t r = 0; r < k_set.size(); ++r) {
        for (size_t c = 0; c < j_set.size(); ++c) {
          block(r, c) = te.of(k_set[r], j_set[c]);
        }
      }
      int rank = numeric_rank(block);
      int cut = min_vertex_cut(ur.dag, all, pos, j_set, k_set);
      if (rank == cut) continue;
      Violation v;
      v.part = "bottleneck";
      v.witnesses = j_set;
      v.witnesses2 = k_set;
      std::ostringstream msg;
      msg << "rank " << rank << " != bottleneck " << cut << " for J={"
          << join_names(ur.dag, j_set) << "} K={" << join_names(ur.dag, k_set)
          << "}";
      v.detail = msg.str();
      report.violations.push_back(v);
    }
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace causamix
