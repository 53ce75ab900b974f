#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causamix/mixing.hpp"

namespace causamix {

// Contrast added to the reconstruction term. Kurtosis (the default) drives
// activation kurtosis cumulants negative and is the right choice for the
// sub-Gaussian (uniform) noise these models carry; LogCosh is the classical
// sparsity penalty for super-Gaussian sources.
enum class IcaContrast { Kurtosis, LogCosh };

struct IcaConfig {
  int n_sources = 0;           // assumed known; must be set by the caller
  double lambda = 0.1;         // contrast weight
  double recon_weight = 1.0;   // reconstruction term weight
  IcaContrast contrast = IcaContrast::Kurtosis;
  bool whiten = true;          // decorrelate to unit covariance before descent
  int iterations = 2000;
  int bootstrap_rounds = 50;
  double bootstrap_fraction = 0.8;
  double prune_threshold = 0.1;  // 0.2 is the usual choice for ME estimates
  double confidence = 0.95;
  bool hungarian_alignment = false;  // exact column matching instead of greedy
  MixingKind kind = MixingKind::Ur;  // stamped on returned estimates
  std::uint64_t seed = 0;
};

// Reconstruction ICA: minimizes the squared error of mapping each (optionally
// whitened) centered sample through the unmixing matrix and its transpose,
// plus the configured source contrast, by full-batch gradient descent with a
// backtracking line search. Whitening makes the reconstruction term a soft
// orthonormality constraint whose feasible set contains the true mixing, so
// it is on by default. Returns the induced mixing estimate, mapped back to
// the original coordinates, with unit-max-abs columns and no column labels.
// Throws DegenerateData on fewer than 10 samples per dimension or a
// rank-deficient covariance, Diverged on a non-finite objective.
MixingMatrix reconstruction_ica(const Eigen::MatrixXd& data,
                                const IcaConfig& cfg,
                                const std::vector<std::string>& var_names = {});

struct BootstrapEstimate {
  MixingMatrix mean;
  Eigen::MatrixXd std_dev;  // entry-wise sample std over rounds
  std::vector<std::string> warnings;
};

// Runs reconstruction_ica on bootstrap_rounds row subsamples of the data,
// aligns every round's columns to round 1 (maximum-|cosine| matching with a
// per-column least-squares rescale), and reports entry-wise mean and std.
// Near-ties in the alignment are reported as warnings.
BootstrapEstimate bootstrap_estimate(const Eigen::MatrixXd& data,
                                     const IcaConfig& cfg,
                                     const std::vector<std::string>& var_names = {});

// Keeps an entry when the one-sided t-test over bootstrap rounds rejects
// |entry| <= prune_threshold at the configured confidence; zeroes it
// otherwise. Entries with zero std are kept exactly when their magnitude
// clears the threshold. `rounds` must match the estimate that produced the
// inputs.
MixingMatrix prune_estimate(const MixingMatrix& mean,
                            const Eigen::MatrixXd& std_dev,
                            const IcaConfig& cfg);

struct LingamResult {
  Eigen::MatrixXd b;        // b(i, j) = weight of edge j -> i, original indexing
  std::vector<int> order;   // recovered causal order, most upstream first
};

// Comparison-only reimplementation of the ICA-LiNGAM skeleton: square
// reconstruction ICA, Hungarian row permutation onto a dominant diagonal,
// diagonal normalization, exhaustive causal-order search (at most 8
// variables) minimizing the non-triangular mass, then magnitude pruning at
// prune_threshold. Not a faithful port of the published implementation.
LingamResult ica_lingam_baseline(const Eigen::MatrixXd& data,
                                 const IcaConfig& cfg);

}  // namespace causamix
