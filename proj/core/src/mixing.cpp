#include "causamix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace causamix {

int TotalEffects::index_of(int id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) throw UnknownNode("no node with id " + std::to_string(id));
  return static_cast<int>(it - ids.begin());
}

TotalEffects total_effects(const WeightedDag& dag) {
  TotalEffects result;
  result.ids = dag.node_ids();
  int n = static_cast<int>(result.ids.size());
  std::map<int, int> index;
  for (int i = 0; i < n; ++i) index[result.ids[i]] = i;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : dag.edges()) m(index[e.dst], index[e.src]) = e.weight;
  dag.topological_order();  // acyclicity check; throws CycleDetected

  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - m;
  result.values = lhs.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  return result;
}

namespace {

std::string noise_label(const std::string& owner) { return "N_" + owner; }

void require_canonical(const SemMeModel& me) {
  if (!me.canonical) throw NotCanonical("model is not in canonical form");
  me.validate();
}

}  // namespace

std::vector<int> me_noise_owners(const SemMeModel& me) {
  std::vector<int> owners;
  for (int id : me.z_ids()) {
    if (!me.is_u_leaf(id)) owners.push_back(id);
  }
  for (int id : me.y_ids()) owners.push_back(id);
  return owners;
}

std::vector<int> ur_noise_owners(const SemUrModel& ur) {
  std::vector<int> owners = ur.h_ids();
  const std::vector<int> xs = ur.x_ids();
  owners.insert(owners.end(), xs.begin(), xs.end());
  return owners;
}

MixingMatrix mixing_me(const SemMeModel& me) {
  require_canonical(me);
  std::vector<int> underlying = me.underlying_ids();
  std::vector<int> noise_owners = me_noise_owners(me);

  TotalEffects te = total_effects(me.dag);
  MixingMatrix result;
  result.kind = MixingKind::Me;
  result.values.resize(underlying.size(), noise_owners.size());
  for (size_t r = 0; r < underlying.size(); ++r) {
    result.row_labels.push_back(me.dag.node(underlying[r]).name);
    for (size_t c = 0; c < noise_owners.size(); ++c) {
      result.values(r, c) = te.of(underlying[r], noise_owners[c]);
    }
  }
  std::vector<std::string> cols;
  for (int id : noise_owners) cols.push_back(noise_label(me.dag.node(id).name));
  result.col_labels = std::move(cols);
  return result;
}

MixingMatrix overall_mixing_me(const SemMeModel& me) {
  MixingMatrix base = mixing_me(me);
  std::vector<int> underlying = me.underlying_ids();

  std::vector<int> measured_leaf;  // u-leaves carrying a merged noise column
  std::vector<int> measured_nonleaf;
  for (int z : me.z_ids()) {
    if (me.is_u_leaf(z)) {
      if (me.u_leaf_noise_ids.count(z)) measured_leaf.push_back(z);
    } else {
      measured_nonleaf.push_back(z);
    }
  }
  std::vector<int> noise_rows = measured_leaf;
  noise_rows.insert(noise_rows.end(), measured_nonleaf.begin(), measured_nonleaf.end());

  std::map<int, int> row_of;
  for (size_t r = 0; r < underlying.size(); ++r) row_of[underlying[r]] = static_cast<int>(r);

  MixingMatrix result;
  result.kind = MixingKind::Overall;
  result.values = Eigen::MatrixXd::Zero(base.rows(), base.cols() + noise_rows.size());
  result.values.leftCols(base.cols()) = base.values;
  for (size_t j = 0; j < noise_rows.size(); ++j) {
    result.values(row_of.at(noise_rows[j]), base.cols() + j) = 1.0;
  }

  for (int id : underlying) {
    const Node& node = me.dag.node(id);
    if (node.kind == NodeKind::UnobservedUnderlying) {
      result.row_labels.push_back(me.dag.node(me.measurement_of.at(id)).name);
    } else {
      result.row_labels.push_back(node.name);
    }
  }
  std::vector<std::string> cols = *base.col_labels;
  for (int z : noise_rows) cols.push_back(noise_label(me.dag.node(me.measurement_of.at(z)).name));
  result.col_labels = std::move(cols);
  return result;
}

MixingMatrix mixing_ur(const SemUrModel& ur) {
  ur.validate();
  std::vector<int> xs = ur.x_ids();
  std::vector<int> noise_owners = ur_noise_owners(ur);

  TotalEffects te = total_effects(ur.dag);
  MixingMatrix result;
  result.kind = MixingKind::Ur;
  result.values.resize(xs.size(), noise_owners.size());
  for (size_t r = 0; r < xs.size(); ++r) {
    result.row_labels.push_back(ur.dag.node(xs[r]).name);
    for (size_t c = 0; c < noise_owners.size(); ++c) {
      result.values(r, c) = te.of(xs[r], noise_owners[c]);
    }
  }
  std::vector<std::string> cols;
  for (int id : noise_owners) cols.push_back(noise_label(ur.dag.node(id).name));
  result.col_labels = std::move(cols);
  return result;
}

MixingMatrix normalize_columns(const MixingMatrix& mix) {
  MixingMatrix result = mix;
  for (int j = 0; j < result.cols(); ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < result.rows(); ++i) {
      if (std::abs(result.values(i, j)) > best) {
        best = std::abs(result.values(i, j));
        arg = i;
      }
    }
    if (best > 0.0) result.values.col(j) /= result.values(arg, j);
  }
  return result;
}

namespace {

// Greedily pairs candidate rows with their closest-to-one-hot columns and
// drops the matched columns. Ties go to the lowest row, then lowest column.
MixingMatrix extract_impl(const MixingMatrix& overall, std::vector<int> candidate_rows,
                          int n_remove) {
  if (n_remove > overall.cols()) {
    throw InsufficientColumns("cannot remove " + std::to_string(n_remove) +
                              " columns from a matrix with " + std::to_string(overall.cols()));
  }
  MixingMatrix normalized = normalize_columns(overall);
  std::sort(candidate_rows.begin(), candidate_rows.end());

  std::vector<bool> removed(normalized.cols(), false);
  std::vector<bool> used(candidate_rows.size(), false);
  for (int step = 0; step < n_remove; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int best_slot = -1, best_col = -1;
    for (size_t s = 0; s < candidate_rows.size(); ++s) {
      if (used[s]) continue;
      Eigen::VectorXd onehot = Eigen::VectorXd::Zero(normalized.rows());
      onehot(candidate_rows[s]) = 1.0;
      for (int j = 0; j < normalized.cols(); ++j) {
        if (removed[j]) continue;
        double dist = (normalized.values.col(j) - onehot).norm();
        if (dist < best - 1e-15) {
          best = dist;
          best_slot = static_cast<int>(s);
          best_col = j;
        }
      }
    }
    removed[best_col] = true;
    used[best_slot] = true;
  }

  MixingMatrix result;
  result.kind = MixingKind::Me;
  result.row_labels = normalized.row_labels;
  int kept = static_cast<int>(std::count(removed.begin(), removed.end(), false));
  result.values.resize(normalized.rows(), kept);
  std::vector<std::string> cols;
  int out = 0;
  for (int j = 0; j < normalized.cols(); ++j) {
    if (removed[j]) continue;
    result.values.col(out++) = normalized.values.col(j);
    if (normalized.col_labels) cols.push_back((*normalized.col_labels)[j]);
  }
  if (normalized.col_labels) result.col_labels = std::move(cols);
  return result;
}

}  // namespace

MixingMatrix extract_wme(const MixingMatrix& overall, const std::vector<int>& measurement_rows) {
  for (int i : measurement_rows) {
    if (i < 0 || i >= overall.rows()) {
      throw Error("measurement row " + std::to_string(i) + " out of range");
    }
  }
  return extract_impl(overall, measurement_rows, static_cast<int>(measurement_rows.size()));
}

MixingMatrix extract_wme(const MixingMatrix& overall, int p_z) {
  std::vector<int> rows;
  for (size_t i = 0; i < overall.row_labels.size(); ++i) {
    if (!overall.row_labels[i].empty() && overall.row_labels[i][0] == 'U') {
      rows.push_back(static_cast<int>(i));
    }
  }
  if (static_cast<int>(rows.size()) < p_z) {
    rows.clear();
    for (int i = 0; i < overall.rows(); ++i) rows.push_back(i);
  }
  if (p_z > static_cast<int>(rows.size()) || p_z > overall.cols()) {
    throw InsufficientColumns("p_z = " + std::to_string(p_z) + " exceeds available rows/columns");
  }
  return extract_impl(overall, rows, p_z);
}

SupportPattern support(const MixingMatrix& mix, double threshold) {
  if (threshold < 0) throw Error("support threshold must be non-negative");
  SupportPattern result;
  result.mask = mix.values.array().abs() > threshold;
  result.row_labels = mix.row_labels;
  result.col_labels = mix.col_labels;
  result.threshold = threshold;
  result.kind = mix.kind;
  return result;
}

}  // namespace causamix
