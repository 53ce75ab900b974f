#include "causamix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "causamix/errors.hpp"

namespace causamix {

namespace {

double draw_weight(std::mt19937_64& rng, const GenConfig& cfg) {
  std::uniform_real_distribution<double> unif(cfg.weight_low, cfg.weight_high);
  double w = unif(rng);
  if (cfg.signed_weights) {
    std::bernoulli_distribution flip(0.5);
    if (flip(rng)) w = -w;
  }
  return w;
}

void require_config(const GenConfig& cfg) {
  if (cfg.p_e < 0.0 || cfg.p_e > 1.0) {
    throw Error("edge probability must lie in [0,1]");
  }
  if (cfg.weight_low <= 0.0 || cfg.weight_high < cfg.weight_low) {
    throw Error("weight range must satisfy 0 < low <= high");
  }
}

std::vector<int> shuffled_ids(int n, int base, std::mt19937_64& rng) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), base);
  std::shuffle(ids.begin(), ids.end(), rng);
  return ids;
}

}  // namespace

SemMeModel gen_sem_me(const GenConfig& cfg) {
  require_config(cfg);
  if (cfg.p < 1) throw Error("gen_sem_me needs p >= 1");
  if (cfg.frac_unobserved < 0.0 || cfg.frac_unobserved > 1.0) {
    throw Error("frac_unobserved must lie in [0,1]");
  }
  std::mt19937_64 rng(cfg.seed);

  std::vector<int> order = shuffled_ids(cfg.p, 0, rng);
  int n_z = static_cast<int>(std::lround(cfg.frac_unobserved * cfg.p));
  std::vector<int> pick = shuffled_ids(cfg.p, 0, rng);
  std::set<int> unobserved(pick.begin(), pick.begin() + n_z);

  SemMeModel model;
  for (int id = 0; id < cfg.p; ++id) {
    bool z = unobserved.count(id) > 0;
    model.dag.add_node(id, (z ? "Z" : "Y") + std::to_string(id),
                       z ? NodeKind::UnobservedUnderlying
                         : NodeKind::ObservedUnderlying);
  }
  std::bernoulli_distribution coin(cfg.p_e);
  for (int a = 0; a < cfg.p; ++a) {
    for (int b = a + 1; b < cfg.p; ++b) {
      if (!coin(rng)) continue;
      model.dag.set_edge(order[a], order[b], draw_weight(rng, cfg));
    }
  }
  model.canonical = true;
  for (int z : model.u_leaf_ids()) model.u_leaf_noise_ids.insert(z);
  attach_measurements(model);
  model.validate();
  return model;
}

SemUrModel gen_sem_ur(const GenConfig& cfg) {
  require_config(cfg);
  if (cfg.q < 2 || cfg.l < 0 || cfg.l >= cfg.q) {
    throw Error("gen_sem_ur needs q >= 2 and 0 <= l < q");
  }
  std::mt19937_64 rng(cfg.seed);

  std::vector<int> order = shuffled_ids(cfg.q, 0, rng);

  SemUrModel model;
  for (int id = 0; id < cfg.q; ++id) {
    model.dag.add_node(id, "X" + std::to_string(id), NodeKind::ObservedUr);
  }
  for (int j = 0; j < cfg.l; ++j) {
    model.dag.add_node(cfg.q + j, "H" + std::to_string(j),
                       NodeKind::LatentRoot);
  }
  std::bernoulli_distribution coin(cfg.p_e);
  for (int a = 0; a < cfg.q; ++a) {
    for (int b = a + 1; b < cfg.q; ++b) {
      if (!coin(rng)) continue;
      model.dag.set_edge(order[a], order[b], draw_weight(rng, cfg));
    }
  }
  for (int j = 0; j < cfg.l; ++j) {
    for (int x = 0; x < cfg.q; ++x) {
      if (!coin(rng)) continue;
      model.dag.set_edge(cfg.q + j, x, draw_weight(rng, cfg));
    }
  }
  for (int j = 0; j < cfg.l; ++j) {
    int h = cfg.q + j;
    std::vector<int> missing;
    for (int x = 0; x < cfg.q; ++x) {
      if (!model.dag.has_edge(h, x)) missing.push_back(x);
    }
    std::shuffle(missing.begin(), missing.end(), rng);
    size_t next = 0;
    while (model.dag.children(h).size() < 2 && next < missing.size()) {
      model.dag.set_edge(h, missing[next++], draw_weight(rng, cfg));
    }
  }
  model.validate();
  return model;
}

MixingMatrix perturb_mixing(const MixingMatrix& mix, double d,
                            std::uint64_t seed) {
  if (d < 0.0) throw Error("perturbation std must be nonnegative");
  if (d == 0.0) return mix;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, d);
  std::bernoulli_distribution hit(0.2);

  MixingMatrix out = mix;
  out.col_labels.reset();
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      if (out.values(r, c) != 0.0) out.values(r, c) += gauss(rng);
    }
  }
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      if (hit(rng)) out.values(r, c) += gauss(rng);
    }
  }
  return out;
}

namespace {

DataMatrix sample_impl(const MixingMatrix& w, int n, std::uint64_t seed) {
  if (n < 1) throw Error("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  Eigen::MatrixXd noise(n, w.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < w.cols(); ++j) noise(i, j) = unif(rng);
  }
  DataMatrix out;
  out.values = noise * w.values.transpose();
  out.col_names = w.row_labels;
  return out;
}

}  // namespace

DataMatrix sample_data(const SemMeModel& me, int n, std::uint64_t seed) {
  return sample_impl(overall_mixing_me(me), n, seed);
}

DataMatrix sample_data(const SemUrModel& ur, int n, std::uint64_t seed) {
  return sample_impl(mixing_ur(ur), n, seed);
}

ShuffledMixing shuffle_mixing(const MixingMatrix& mix, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ShuffledMixing out;
  out.row_perm.resize(mix.rows());
  out.col_perm.resize(mix.cols());
  std::iota(out.row_perm.begin(), out.row_perm.end(), 0);
  std::iota(out.col_perm.begin(), out.col_perm.end(), 0);
  std::shuffle(out.row_perm.begin(), out.row_perm.end(), rng);
  std::shuffle(out.col_perm.begin(), out.col_perm.end(), rng);

  out.mix.kind = mix.kind;
  out.mix.values.resize(mix.rows(), mix.cols());
  out.mix.row_labels.resize(mix.rows());
  if (mix.col_labels) {
    out.mix.col_labels.emplace(mix.cols());
  }
  for (int r = 0; r < mix.rows(); ++r) {
    out.mix.row_labels[r] = mix.row_labels[out.row_perm[r]];
    for (int c = 0; c < mix.cols(); ++c) {
      out.mix.values(r, c) = mix.values(out.row_perm[r], out.col_perm[c]);
    }
  }
  if (mix.col_labels) {
    for (int c = 0; c < mix.cols(); ++c) {
      (*out.mix.col_labels)[c] = (*mix.col_labels)[out.col_perm[c]];
    }
  }
  return out;
}

}  // namespace causamix
