#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causamix/mixing.hpp"
#include "causamix/model.hpp"

namespace causamix {

struct GenConfig {
  int p = 10;  // underlying variable count (measurement-error models)
  int q = 4;   // observed count (unobserved-root models)
  int l = 1;   // latent root count
  double p_e = 0.4;             // edge probability
  double frac_unobserved = 0.8; // share of underlying variables without direct observation
  double weight_low = 0.5;
  double weight_high = 1.0;
  bool signed_weights = false;  // flip each weight's sign with probability 1/2
  std::uint64_t seed = 0;
};

// Random-order DAG over p underlying variables: a shuffled causal order, each
// forward pair wired with probability p_e, weights uniform in the configured
// range. A random frac_unobserved share of the variables becomes unobserved
// (measured through a noisy measurement node); the result is canonical with
// every u-leaf keeping its merged noise term.
SemMeModel gen_sem_me(const GenConfig& cfg);

// Observed nodes 0..q-1 in a shuffled causal order with forward edges, latent
// roots q..q+l-1 wired to each observed node with probability p_e. A latent
// with fewer than two children gets extra children drawn uniformly without
// replacement.
SemUrModel gen_sem_ur(const GenConfig& cfg);

// Two-stage contamination: Gaussian noise with standard deviation d added to
// every nonzero entry, then, independently with probability 0.2, to each
// entry. d = 0 returns the input unchanged. Column labels are dropped: after
// contamination the column identities are no longer trustworthy.
MixingMatrix perturb_mixing(const MixingMatrix& mix, double d,
                            std::uint64_t seed);

struct DataMatrix {
  Eigen::MatrixXd values;              // one row per sample
  std::vector<std::string> col_names;  // observed variable names
};

// Draws every exogenous noise i.i.d. uniform on [-0.5, 0.5] and pushes it
// through the model's noise-to-observation map. Observed dimensions are the
// measurements plus the observed underlying variables (ME) or the observed
// variables (UR).
DataMatrix sample_data(const SemMeModel& me, int n, std::uint64_t seed);
DataMatrix sample_data(const SemUrModel& ur, int n, std::uint64_t seed);

struct ShuffledMixing {
  MixingMatrix mix;
  // perm[i] = index in the input of the i-th row (column) of the output.
  std::vector<int> row_perm;
  std::vector<int> col_perm;
};

// Randomly permutes rows and columns (labels travel with their lines), hiding
// the causal order the generator produced.
ShuffledMixing shuffle_mixing(const MixingMatrix& mix, std::uint64_t seed);

}  // namespace causamix
