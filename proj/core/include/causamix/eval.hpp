#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causamix/constants.hpp"
#include "causamix/ica.hpp"
#include "causamix/model.hpp"
#include "causamix/recovery.hpp"

namespace causamix {

enum class ComparisonMode { VsTruth, VsClosestDogMember, BMatrixMatched };

struct MetricReport {
  double shd = 0.0;           // entry-wise adjacency differences (a reversed
                              // edge therefore costs 2)
  double shd_per_edge = 0.0;  // NaN when the truth has no edges
  double precision = 0.0;     // 0/0 counts as 0
  double recall = 0.0;
  double f1 = 0.0;
  bool zero_true_edges = false;
  ComparisonMode mode = ComparisonMode::VsTruth;
};

// Support metrics between same-shape adjacency matrices; entry (i, j) is the
// weight of edge j -> i and any nonzero entry counts as an edge.
MetricReport structure_metrics(const Eigen::MatrixXd& recovered,
                               const Eigen::MatrixXd& truth);

// adjacency(i, j) = weight of edge j -> i, rows/columns over ascending ids.
Eigen::MatrixXd weighted_adjacency(const WeightedDag& dag);
Eigen::MatrixXd underlying_adjacency(const SemMeModel& me);  // no measurements
Eigen::MatrixXd observed_adjacency(const SemUrModel& ur);    // X rows/cols
Eigen::MatrixXd latent_loadings(const SemUrModel& ur);       // X rows, H cols

struct ClosestMember {
  int index = -1;      // position in dog_equivalence_members(truth)
  double distance = 0.0;
  MetricReport report;
  std::optional<AnyModel> member;
};

// Enumerates the truth's DOG class and picks the member whose weighted
// adjacency is Frobenius-nearest to the recovered one (ME: underlying
// adjacency; UR: observed adjacency), then scores the recovered support
// against that member.
ClosestMember closest_dog_member(const Eigen::MatrixXd& recovered_adjacency,
                                 const SemMeModel& truth,
                                 long long cap = kClassCap);
ClosestMember closest_dog_member(const Eigen::MatrixXd& recovered_a,
                                 const SemUrModel& truth,
                                 long long cap = kClassCap);
ClosestMember closest_dog_member(const AnyModel& recovered,
                                 const AnyModel& truth,
                                 long long cap = kClassCap);

struct BMatch {
  // Matched recovered column per truth-side column; -1 marks a column that
  // only exists as zero padding on the recovered side.
  std::vector<int> truth_to_recovered;
  std::vector<double> scales;  // factor applied to the matched column
  MetricReport report;
};

// Optimal column matching between latent-loading matrices, invariant to
// column order and nonzero column scale. Column-count mismatches are padded
// with zero columns so missing and spurious latents both cost support errors.
// Exact assignment up to 32 columns, greedy beyond.
BMatch match_b_columns(const Eigen::MatrixXd& recovered,
                       const Eigen::MatrixXd& truth);

struct PrunedRecovery {
  MixingMatrix estimate;      // the winning pruned estimate
  RecoveryResult recovery;    // its recovery
  double prune_threshold;     // grid value that produced it
};

// Prunes a bootstrap estimate at every threshold in `grid` (same t-test as
// prune_estimate) and recovers each candidate, keeping the one whose
// recovery spends the fewest edges; ties go to the larger threshold. A wrong
// or inflated support always costs extra edges, so the sparsest recovery
// marks the best-supported model. Thresholds whose recovery fails are
// skipped; if all fail, the last error is rethrown.
PrunedRecovery recover_pruned(const BootstrapEstimate& boot,
                              const IcaConfig& cfg, const RecoverConfig& rc,
                              const std::vector<double>& grid = {
                                  0.1, 0.15, 0.2, 0.25, 0.3});

struct ExperimentProtocol {
  std::string case_name = "case1";  // "case1": noisy mixing; "case2": raw data
  std::string model_class = "me";   // "me" | "ur"; case2 is always "ur"
  std::vector<int> sizes;           // p (me) or q (ur), one cell per entry
  std::vector<int> latents;         // parallel to sizes; default 1 each (ur)
  // case1: mixing-noise std d. case2: samples per variable (times q).
  std::vector<double> noise_grid;
  int trials = 50;
  double p_e = 0.4;
  double frac_unobserved = 0.8;
  bool signed_weights = false;
  double edge_threshold = kEdgeThresholdNoisy;
  long long class_cap = kClassCap;
  IcaConfig ica;  // case2 estimation knobs; n_sources/kind/seed filled per trial
  std::uint64_t master_seed = 0;
  // Aggregate CSV target; per-trial rows go to out_path + ".trials.csv" and
  // completed (cell, trial, method) rows are skipped on rerun. Empty: no
  // files, no resume.
  std::string out_path;
  int workers = 0;  // 0: CAUSAMIX_WORKERS / hardware
};

struct ResultRow {
  std::string method;       // "dog", "aog", "lingam"
  std::string model_class;
  int size = 0;
  double noise_param = 0.0;
  std::string metric;       // "f1", "precision", "recall", "shd_per_edge", "b_f1"
  double mean = 0.0;
  double stddev = 0.0;
  int n_trials = 0;    // successful trials with a finite value
  int n_failures = 0;  // trials that threw for this method
};

struct ResultsTable {
  std::vector<ResultRow> rows;
};

ExperimentProtocol protocol_from_json(const std::string& text);
std::string results_to_csv(const ResultsTable& table);

// Case 1: generate a model per trial, shuffle and contaminate its mixing
// matrix, run DOG recovery and the random-center AOG baseline, and score
// against the closest DOG-class member (plus column-matched loadings for UR).
// Case 2: generate SEM-URs, sample data, estimate the mixing by bootstrapped
// reconstruction ICA with pruning, recover as in case 1, and additionally run
// the square ICA-LiNGAM baseline scored against the true observed structure.
// Per-trial seeds derive from (master_seed, cell, trial); failures increment
// the failure count instead of aborting.
ResultsTable run_experiment(const ExperimentProtocol& proto);

}  // namespace causamix
