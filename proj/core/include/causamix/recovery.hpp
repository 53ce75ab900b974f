#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "causamix/constants.hpp"
#include "causamix/grouping.hpp"
#include "causamix/mixing.hpp"
#include "causamix/model.hpp"

namespace causamix {

// Coefficients pulled out of a mixing matrix for one center assignment.
// `adjacency` covers the observed/underlying variables in mixing-row order,
// with adjacency(i, j) the weight of edge j -> i. For UR inputs `loadings`
// holds the latent-to-observed weights, one column per unchosen noise column
// (ascending), determined only up to column permutation and scale.
struct Reconstruction {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd loadings;        // empty for ME
  std::vector<int> center_rows;    // ME: chosen center row per carrying group
  std::vector<int> leftover_cols;  // UR: unchosen columns backing `loadings`
  double cond = 0.0;               // condition estimate of the pivot block
  bool cond_warning = false;
};

// Inverts the center submatrix of an ME mixing matrix: rows[g] is the chosen
// center of carrying group g and cols[g] its noise column. Throws
// SingularSubmatrix when a diagonal entry vanishes or the block is singular.
Reconstruction reconstruct_me(const MixingMatrix& mix,
                              const std::vector<int>& center_rows,
                              const std::vector<int>& noise_cols);

// UR dual: rows[g] is the observed row paired with carrying group g and
// cols[g] the noise column chosen as that row's own noise.
Reconstruction reconstruct_ur(const MixingMatrix& mix,
                              const std::vector<int>& paired_rows,
                              const std::vector<int>& center_cols);

// Builds the model for one center assignment of a positions-domain grouping
// over `mix`. ME models observe the centers and measure everything else; UR
// models read latents off the unchosen columns. Entries with |w| <= zero_tol
// are dropped. Throws CycleDetected when the coefficients are not acyclic.
std::variant<SemMeModel, SemUrModel> coefficients_from_centers(
    const MixingMatrix& mix, const OrderedGrouping& grouping,
    const std::vector<int>& assignment, double zero_tol = kExactZeroTol);

struct RecoverConfig {
  double edge_threshold = kEdgeThresholdNoisy;  // |w| <= threshold is no edge
  long long class_cap = kClassCap;
  int workers = 0;  // 0: CAUSAMIX_WORKERS / hardware
};

// One evaluated center assignment.
struct Candidate {
  std::vector<int> centers;  // chosen member per group, grouping order
  int edge_count = 0;
  Reconstruction recon;
  // Set when the thresholded adjacency is acyclic.
  std::optional<std::variant<SemMeModel, SemUrModel>> model;
};

struct RecoveryResult {
  std::vector<Candidate> best;  // all minimizers, enumeration order
  int best_index = 0;           // position in `best` of the canonical
                                // (lexicographically smallest centers) one
  int edge_count = 0;
  OrderedGrouping grouping;
  MixingMatrix pruned;
  double prune_worst = 0.0;  // largest |entry| zeroed while pruning
  double edge_threshold = 0.0;
  // Edge count per enumerated assignment; -1 when the candidate was abandoned
  // against the incumbent bound or its pivot block was singular. Filled only
  // when the class has at most 100000 members.
  std::vector<int> candidate_edge_counts;
};

// Prunes the matrix to a valid support, enumerates every center assignment of
// the recovered grouping, reconstructs each, and returns all assignments with
// the fewest edges past the threshold. Throws AllCandidatesSingular when no
// assignment yields an invertible center block.
RecoveryResult recover_dog(const MixingMatrix& mix,
                           const RecoverConfig& config = {});

// Same pipeline but evaluates a single uniformly random center assignment.
RecoveryResult recover_aog_baseline(const MixingMatrix& mix, unsigned seed,
                                    const RecoverConfig& config = {});

// Every model reachable from the ground truth by re-choosing the center
// inside each of its identifiability groups, rebuilt from the exact mixing
// matrix. The input's own assignment is included.
std::vector<SemMeModel> dog_equivalence_members(const SemMeModel& me,
                                                long long cap = kClassCap);
std::vector<SemUrModel> dog_equivalence_members(const SemUrModel& ur,
                                                long long cap = kClassCap);

}  // namespace causamix
