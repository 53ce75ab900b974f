#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "causamix/model.hpp"

namespace causamix {

// Total causal effects between every ordered pair of nodes: the sum over all
// directed paths of the product of edge weights, with self-effect 1. Computed
// by solving (I - M)T = I against the weighted adjacency M.
struct TotalEffects {
  Eigen::MatrixXd values;  // values(j, i) = effect of ids[i] on ids[j]
  std::vector<int> ids;    // ascending node ids; indexes rows and columns

  int index_of(int id) const;
  double of(int on_id, int from_id) const { return values(index_of(on_id), index_of(from_id)); }
};

TotalEffects total_effects(const WeightedDag& dag);

enum class MixingKind { Me, Ur, Overall };

// Linear map from independent noise terms (columns) to variables (rows).
// Column labels are absent on estimated matrices.
struct MixingMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;
  std::optional<std::vector<std::string>> col_labels;
  MixingKind kind = MixingKind::Me;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

struct SupportPattern {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::vector<std::string> row_labels;
  std::optional<std::vector<std::string>> col_labels;
  double threshold = 0.0;
  MixingKind kind = MixingKind::Me;

  int rows() const { return static_cast<int>(mask.rows()); }
  int cols() const { return static_cast<int>(mask.cols()); }
};

// Noise-to-variable map of the underlying layer of a canonical ME model.
// Rows: underlying variables, ascending id. Columns: one per nu-leaf noise
// term, unobserved non-leaf nodes first, then observed nodes, each ascending.
MixingMatrix mixing_me(const SemMeModel& me);

// Noise-to-observation map of the full measured system: rows are the observed
// variables (the measurement of each Z, plus each Y), ascending by underlying
// id. The nu-leaf noise columns of mixing_me come first, then a one-hot column
// per measurement noise term: merged u-leaf noises (for u-leaves listed in
// u_leaf_noise_ids), then non-leaf measurement errors, each ascending by Z id.
MixingMatrix overall_mixing_me(const SemMeModel& me);

// Noise-to-observation map of a SEM-UR. Rows: observed variables ascending.
// Columns: latent noises N_H ascending, then observed noises N_X ascending.
MixingMatrix mixing_ur(const SemUrModel& ur);

// Ids of the nodes owning the noise columns of mixing_me / mixing_ur, in
// column order.
std::vector<int> me_noise_owners(const SemMeModel& me);
std::vector<int> ur_noise_owners(const SemUrModel& ur);

// Undoes the measurement block of an overall mixing matrix: normalizes every
// column by its largest-absolute-value entry (sign preserved), then repeatedly
// removes the column nearest in Euclidean distance to a one-hot vector of a
// still-unmatched measurement row, once per measurement row. Rows and their
// labels are untouched. The count overload treats every row whose label names
// a measurement as a measurement row, or all rows when labels are absent.
MixingMatrix extract_wme(const MixingMatrix& overall, const std::vector<int>& measurement_rows);
MixingMatrix extract_wme(const MixingMatrix& overall, int p_z);

SupportPattern support(const MixingMatrix& mix, double threshold);

// Divides each column by its largest-absolute-value entry, keeping that
// entry's sign; all-zero columns are left alone.
MixingMatrix normalize_columns(const MixingMatrix& mix);

}  // namespace causamix
