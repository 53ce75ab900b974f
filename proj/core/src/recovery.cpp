#include "causamix/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "causamix/errors.hpp"
#include "causamix/parallel.hpp"

namespace causamix {

namespace {

void check_indices(const std::vector<int>& idx, int limit, const char* what) {
  std::set<int> seen;
  for (int i : idx) {
    if (i < 0 || i >= limit)
      throw Error(std::string(what) + " index " + std::to_string(i) +
                  " out of range");
    if (!seen.insert(i).second)
      throw Error(std::string(what) + " index " + std::to_string(i) +
                  " repeated");
  }
}

// Normalizes each column of the pivot block to a unit diagonal, inverts it,
// and reports the condition estimate. The scale of column g is returned so
// the caller can renormalize companion blocks consistently.
Eigen::MatrixXd invert_pivot(Eigen::MatrixXd block, std::vector<double>& scales,
                             double& cond, bool& warn) {
  const int m = static_cast<int>(block.rows());
  scales.assign(m, 1.0);
  for (int j = 0; j < m; ++j) {
    const double d = block(j, j);
    if (std::abs(d) < 1e-12)
      throw SingularSubmatrix("pivot block has a vanishing diagonal entry at " +
                              std::to_string(j));
    scales[j] = d;
    block.col(j) /= d;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || !std::isfinite(rcond))
    throw SingularSubmatrix("pivot block is numerically singular");
  cond = 1.0 / rcond;
  warn = cond > kCondWarn;
  return lu.solve(Eigen::MatrixXd::Identity(m, m));
}

}  // namespace

Reconstruction reconstruct_me(const MixingMatrix& mix,
                              const std::vector<int>& center_rows,
                              const std::vector<int>& noise_cols) {
  if (center_rows.size() != noise_cols.size())
    throw ShapeMismatch("center rows and noise columns differ in length");
  check_indices(center_rows, mix.rows(), "center row");
  check_indices(noise_cols, mix.cols(), "noise column");
  const int p = mix.rows();
  const int m = static_cast<int>(center_rows.size());
  const Eigen::MatrixXd& w = mix.values;

  Eigen::MatrixXd block(m, m);
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h) block(g, h) = w(center_rows[g], noise_cols[h]);

  Reconstruction recon;
  recon.center_rows = center_rows;
  std::vector<double> scales;
  const Eigen::MatrixXd inv =
      invert_pivot(std::move(block), scales, recon.cond, recon.cond_warning);

  std::vector<int> rest;
  {
    std::set<int> centers(center_rows.begin(), center_rows.end());
    for (int r = 0; r < p; ++r)
      if (!centers.count(r)) rest.push_back(r);
  }
  Eigen::MatrixXd rest_block(static_cast<int>(rest.size()), m);
  for (size_t r = 0; r < rest.size(); ++r)
    for (int h = 0; h < m; ++h)
      rest_block(static_cast<int>(r), h) = w(rest[r], noise_cols[h]) / scales[h];

  const Eigen::MatrixXd among = Eigen::MatrixXd::Identity(m, m) - inv;
  const Eigen::MatrixXd from_centers = rest_block * inv;

  recon.adjacency = Eigen::MatrixXd::Zero(p, p);
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h)
      recon.adjacency(center_rows[g], center_rows[h]) = among(g, h);
  for (size_t r = 0; r < rest.size(); ++r)
    for (int h = 0; h < m; ++h)
      recon.adjacency(rest[r], center_rows[h]) =
          from_centers(static_cast<int>(r), h);
  return recon;
}

Reconstruction reconstruct_ur(const MixingMatrix& mix,
                              const std::vector<int>& paired_rows,
                              const std::vector<int>& center_cols) {
  if (paired_rows.size() != center_cols.size())
    throw ShapeMismatch("paired rows and center columns differ in length");
  const int q = mix.rows();
  if (static_cast<int>(paired_rows.size()) != q)
    throw ShapeMismatch("every observed row needs exactly one center column");
  check_indices(paired_rows, q, "paired row");
  check_indices(center_cols, mix.cols(), "center column");
  const Eigen::MatrixXd& w = mix.values;

  std::vector<int> col_of_row(q, -1);
  for (int g = 0; g < q; ++g) col_of_row[paired_rows[g]] = center_cols[g];

  Eigen::MatrixXd block(q, q);
  for (int r = 0; r < q; ++r) block.col(r) = w.col(col_of_row[r]);

  Reconstruction recon;
  std::vector<double> scales;
  const Eigen::MatrixXd inv =
      invert_pivot(std::move(block), scales, recon.cond, recon.cond_warning);
  recon.adjacency = Eigen::MatrixXd::Identity(q, q) - inv;

  std::set<int> chosen(center_cols.begin(), center_cols.end());
  for (int c = 0; c < mix.cols(); ++c)
    if (!chosen.count(c)) recon.leftover_cols.push_back(c);
  Eigen::MatrixXd rest(q, static_cast<int>(recon.leftover_cols.size()));
  for (size_t j = 0; j < recon.leftover_cols.size(); ++j)
    rest.col(static_cast<int>(j)) = w.col(recon.leftover_cols[j]);
  recon.loadings = inv * rest;
  return recon;
}

namespace {

SemMeModel build_me_model(const MixingMatrix& mix, const Reconstruction& recon,
                          double zero_tol) {
  const int p = mix.rows();
  const std::set<int> centers(recon.center_rows.begin(),
                              recon.center_rows.end());
  SemMeModel me;
  for (int r = 0; r < p; ++r) {
    const std::string name = r < static_cast<int>(mix.row_labels.size())
                                 ? mix.row_labels[r]
                                 : "V" + std::to_string(r);
    me.dag.add_node(r, name,
                    centers.count(r) ? NodeKind::ObservedUnderlying
                                     : NodeKind::UnobservedUnderlying);
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (std::abs(recon.adjacency(i, j)) > zero_tol)
        me.dag.set_edge(j, i, recon.adjacency(i, j));
  attach_measurements(me);
  me.canonical = true;
  const auto leaves = me.u_leaf_ids();
  me.u_leaf_noise_ids.insert(leaves.begin(), leaves.end());
  me.validate();
  return me;
}

SemUrModel build_ur_model(const MixingMatrix& mix, const Reconstruction& recon,
                          double zero_tol) {
  const int q = mix.rows();
  const int l = static_cast<int>(recon.leftover_cols.size());
  SemUrModel ur;
  for (int r = 0; r < q; ++r) {
    const std::string name = r < static_cast<int>(mix.row_labels.size())
                                 ? mix.row_labels[r]
                                 : "X" + std::to_string(r);
    ur.dag.add_node(r, name, NodeKind::ObservedUr);
  }
  for (int j = 0; j < l; ++j) {
    std::string name = "H" + std::to_string(j);
    if (mix.col_labels &&
        recon.leftover_cols[j] < static_cast<int>(mix.col_labels->size())) {
      name = (*mix.col_labels)[recon.leftover_cols[j]];
      if (name.rfind("N_", 0) == 0) name = name.substr(2);
    }
    ur.dag.add_node(q + j, name, NodeKind::LatentRoot);
  }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (std::abs(recon.adjacency(i, j)) > zero_tol)
        ur.dag.set_edge(j, i, recon.adjacency(i, j));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < l; ++j)
      if (std::abs(recon.loadings(i, j)) > zero_tol)
        ur.dag.set_edge(q + j, i, recon.loadings(i, j));
  ur.validate();
  return ur;
}

int count_entries(const Eigen::MatrixXd& m, double threshold, int bail_above) {
  int count = 0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > threshold) ++count;
    if (count > bail_above) return count;
  }
  return count;
}

struct AssignmentPlan {
  bool ur = false;
  std::vector<int> carrying;   // indices of column/row-carrying groups
  std::vector<int> fixed;      // ME: noise col per carrying group; UR: row
};

AssignmentPlan plan_for(const OrderedGrouping& grouping) {
  AssignmentPlan plan;
  plan.ur = grouping.source == MixingKind::Ur;
  for (size_t g = 0; g < grouping.groups.size(); ++g)
    if (grouping.groups[g].paired) {
      plan.carrying.push_back(static_cast<int>(g));
      plan.fixed.push_back(*grouping.groups[g].paired);
    }
  return plan;
}

Reconstruction reconstruct_assignment(const MixingMatrix& mix,
                                      const AssignmentPlan& plan,
                                      const std::vector<int>& assignment) {
  std::vector<int> chosen(plan.carrying.size());
  for (size_t k = 0; k < plan.carrying.size(); ++k)
    chosen[k] = assignment[plan.carrying[k]];
  if (plan.ur) return reconstruct_ur(mix, plan.fixed, chosen);
  return reconstruct_me(mix, chosen, plan.fixed);
}

int reconstruction_edges(const Reconstruction& recon, double threshold,
                         int bail_above) {
  int count = count_entries(recon.adjacency, threshold, bail_above);
  if (count > bail_above) return count;
  return count + count_entries(recon.loadings, threshold, bail_above - count);
}

}  // namespace

std::variant<SemMeModel, SemUrModel> coefficients_from_centers(
    const MixingMatrix& mix, const OrderedGrouping& grouping,
    const std::vector<int>& assignment, double zero_tol) {
  if (grouping.domain != GroupingDomain::Positions)
    throw Error("center assignments require a positions-domain grouping");
  if (assignment.size() != grouping.groups.size())
    throw ShapeMismatch("assignment length does not match the group count");
  const AssignmentPlan plan = plan_for(grouping);
  const Reconstruction recon = reconstruct_assignment(mix, plan, assignment);
  if (plan.ur) return build_ur_model(mix, recon, zero_tol);
  return build_me_model(mix, recon, zero_tol);
}

namespace {

RecoveryResult search(const RecoverConfig& config,
                      std::vector<std::vector<int>> assignments,
                      OrderedGrouping grouping, MixingMatrix pruned,
                      double prune_worst) {
  const AssignmentPlan plan = plan_for(grouping);
  const int n = static_cast<int>(assignments.size());

  // Pass 1: edge count per assignment under a shared incumbent bound.
  // -1: abandoned against the bound, -2: singular pivot block.
  std::vector<int> counts(n, -1);
  std::atomic<int> incumbent{INT_MAX};
  parallel_for(n, config.workers, [&](int i) {
    int bound = incumbent.load(std::memory_order_relaxed);
    try {
      const Reconstruction recon =
          reconstruct_assignment(pruned, plan, assignments[i]);
      const int edges =
          reconstruction_edges(recon, config.edge_threshold, bound);
      if (edges > bound) {
        counts[i] = -1;
        return;
      }
      counts[i] = edges;
      while (edges < bound &&
             !incumbent.compare_exchange_weak(bound, edges,
                                              std::memory_order_relaxed)) {
      }
    } catch (const SingularSubmatrix&) {
      counts[i] = -2;
    }
  });

  const int best = incumbent.load();
  if (best == INT_MAX)
    throw AllCandidatesSingular(
        "every center assignment has a singular pivot block");

  // Pass 2: collect the minimizers in enumeration order.
  RecoveryResult result;
  result.edge_count = best;
  result.edge_threshold = config.edge_threshold;
  result.prune_worst = prune_worst;
  for (int i = 0; i < n; ++i) {
    if (counts[i] != best) continue;
    Candidate cand;
    cand.centers = assignments[i];
    cand.edge_count = best;
    cand.recon = reconstruct_assignment(pruned, plan, assignments[i]);
    try {
      cand.model = coefficients_from_centers(pruned, grouping, assignments[i],
                                             config.edge_threshold);
    } catch (const CycleDetected&) {
      cand.model.reset();
    }
    result.best.push_back(std::move(cand));
  }
  result.best_index = 0;
  for (size_t i = 1; i < result.best.size(); ++i)
    if (result.best[i].centers < result.best[result.best_index].centers)
      result.best_index = static_cast<int>(i);
  if (n <= 100000) result.candidate_edge_counts = std::move(counts);
  for (int& c : result.candidate_edge_counts)
    if (c == -2) c = -1;
  result.grouping = std::move(grouping);
  result.pruned = std::move(pruned);
  return result;
}

}  // namespace

RecoveryResult recover_dog(const MixingMatrix& mix,
                           const RecoverConfig& config) {
  auto [pruned, worst] = prune_until_valid(mix);
  OrderedGrouping grouping = aog_from_mixing(support(pruned, 0.0));
  std::vector<std::vector<int>> assignments =
      enumerate_class(grouping, config.class_cap);
  return search(config, std::move(assignments), std::move(grouping),
                std::move(pruned), worst);
}

RecoveryResult recover_aog_baseline(const MixingMatrix& mix, unsigned seed,
                                    const RecoverConfig& config) {
  auto [pruned, worst] = prune_until_valid(mix);
  OrderedGrouping grouping = aog_from_mixing(support(pruned, 0.0));
  std::mt19937_64 rng(seed);
  std::vector<int> assignment;
  assignment.reserve(grouping.groups.size());
  for (const Group& g : grouping.groups) {
    std::uniform_int_distribution<size_t> pick(0, g.members.size() - 1);
    assignment.push_back(g.members[pick(rng)]);
  }
  return search(config, {assignment}, std::move(grouping), std::move(pruned),
                worst);
}

namespace {

template <typename Model>
std::vector<Model> equivalence_members(
    const OrderedGrouping& dog, const MixingMatrix& mix,
    const std::map<int, int>& row_of, const std::map<int, int>& col_of,
    bool ur, long long cap) {
  // Per carrying group: the fixed index (ME: the anchor's noise column,
  // UR: the anchor's row) and the per-member choices (ME: member rows,
  // UR: member noise columns).
  std::vector<int> fixed;
  std::vector<std::vector<int>> choices;
  long long total = 1;
  for (const Group& g : dog.groups) {
    if (!g.center) continue;  // detached u-leaf / latent: nothing to choose
    if (ur)
      fixed.push_back(row_of.at(*g.center));
    else
      fixed.push_back(col_of.at(*g.center));
    std::vector<int> opts;
    for (int m : g.members)
      opts.push_back(ur ? col_of.at(m) : row_of.at(m));
    if (total > cap / static_cast<long long>(opts.size()))
      throw ClassTooLarge("equivalence class exceeds cap of " +
                          std::to_string(cap));
    total *= static_cast<long long>(opts.size());
    choices.push_back(std::move(opts));
  }

  std::vector<Model> members;
  std::vector<size_t> idx(choices.size(), 0);
  while (true) {
    std::vector<int> chosen(choices.size());
    for (size_t k = 0; k < choices.size(); ++k) chosen[k] = choices[k][idx[k]];
    Reconstruction recon = ur ? reconstruct_ur(mix, fixed, chosen)
                              : reconstruct_me(mix, chosen, fixed);
    if constexpr (std::is_same_v<Model, SemMeModel>)
      members.push_back(build_me_model(mix, recon, kExactZeroTol));
    else
      members.push_back(build_ur_model(mix, recon, kExactZeroTol));

    size_t k = choices.size();
    bool done = true;
    while (k > 0) {
      --k;
      if (++idx[k] < choices[k].size()) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
    if (done) break;
  }
  return members;
}

}  // namespace

std::vector<SemMeModel> dog_equivalence_members(const SemMeModel& me,
                                                long long cap) {
  const SemMeModel canon = canonicalize_me(me);
  const OrderedGrouping dog = dog_from_structure(canon);
  const MixingMatrix mix = mixing_me(canon);
  std::map<int, int> row_of, col_of;
  {
    const auto rows = canon.underlying_ids();
    for (size_t r = 0; r < rows.size(); ++r)
      row_of[rows[r]] = static_cast<int>(r);
    const auto owners = me_noise_owners(canon);
    for (size_t c = 0; c < owners.size(); ++c)
      col_of[owners[c]] = static_cast<int>(c);
  }
  return equivalence_members<SemMeModel>(dog, mix, row_of, col_of, false, cap);
}

std::vector<SemUrModel> dog_equivalence_members(const SemUrModel& ur,
                                                long long cap) {
  ur.validate();
  const OrderedGrouping dog = dog_from_structure(ur);
  const MixingMatrix mix = mixing_ur(ur);
  std::map<int, int> row_of, col_of;
  {
    const auto rows = ur.x_ids();
    for (size_t r = 0; r < rows.size(); ++r)
      row_of[rows[r]] = static_cast<int>(r);
    const auto owners = ur_noise_owners(ur);
    for (size_t c = 0; c < owners.size(); ++c)
      col_of[owners[c]] = static_cast<int>(c);
  }
  return equivalence_members<SemUrModel>(dog, mix, row_of, col_of, true, cap);
}

}  // namespace causamix
