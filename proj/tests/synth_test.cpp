#include "causamix/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "causamix/errors.hpp"
#include "causamix/eval.hpp"
#include "causamix/mixing.hpp"
#include "fixtures.hpp"

namespace causamix {
namespace {

TEST(GenMeTest, is_deterministic_in_the_seed) {
  GenConfig cfg;
  cfg.seed = 11;
  SemMeModel a = gen_sem_me(cfg);
  SemMeModel b = gen_sem_me(cfg);
  EXPECT_EQ(underlying_adjacency(a), underlying_adjacency(b));
  EXPECT_EQ(a.z_ids(), b.z_ids());

  cfg.seed = 12;
  SemMeModel c = gen_sem_me(cfg);
  EXPECT_NE(underlying_adjacency(a), underlying_adjacency(c));
}

TEST(GenMeTest, respects_size_and_observation_split) {
  GenConfig cfg;
  cfg.seed = 3;
  SemMeModel me = gen_sem_me(cfg);
  EXPECT_NO_THROW(me.validate());
  EXPECT_TRUE(me.canonical);
  EXPECT_EQ(me.underlying_ids().size(), 10u);
  // lround(0.8 * 10) underlying variables are unobserved.
  EXPECT_EQ(me.z_ids().size(), 8u);
  EXPECT_EQ(me.y_ids().size(), 2u);
  EXPECT_EQ(me.u_ids().size(), 8u);
  std::vector<int> leaves = me.u_leaf_ids();
  EXPECT_EQ(me.u_leaf_noise_ids,
            std::set<int>(leaves.begin(), leaves.end()));
}

TEST(GenMeTest, single_variable_and_bad_config) {
  GenConfig cfg;
  cfg.p = 1;
  cfg.frac_unobserved = 0.0;
  SemMeModel me = gen_sem_me(cfg);
  EXPECT_EQ(me.underlying_ids().size(), 1u);
  EXPECT_TRUE(me.dag.edges().empty());

  GenConfig bad;
  bad.frac_unobserved = 1.5;
  EXPECT_THROW(gen_sem_me(bad), Error);
}

TEST(GenMeTest, edge_count_tracks_the_probability) {
  GenConfig cfg;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    SemMeModel me = gen_sem_me(cfg);
    total += (underlying_adjacency(me).array() != 0.0).count();
  }
  // 45 candidate pairs at p_e = 0.4.
  EXPECT_NEAR(total / 1000.0, 18.0, 0.5);
}

TEST(GenMeTest, weight_ranges_and_signs) {
  GenConfig cfg;
  cfg.seed = 21;
  SemMeModel plain = gen_sem_me(cfg);
  for (const Edge& e : plain.dag.edges()) {
    if (plain.dag.node(e.dst).kind == NodeKind::Measurement) continue;
    EXPECT_GE(e.weight, 0.5);
    EXPECT_LE(e.weight, 1.0);
  }

  cfg.signed_weights = true;
  bool saw_negative = false;
  for (std::uint64_t seed = 0; seed < 10 && !saw_negative; ++seed) {
    cfg.seed = seed;
    for (const Edge& e : gen_sem_me(cfg).dag.edges()) {
      if (e.weight < 0.0) saw_negative = true;
    }
  }
  EXPECT_TRUE(saw_negative);
}

TEST(GenUrTest, latents_always_have_two_children) {
  GenConfig cfg;
  cfg.q = 2;
  cfg.l = 1;
  cfg.p_e = 0.0;  // force the repair path
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    cfg.seed = seed;
    SemUrModel ur = gen_sem_ur(cfg);
    EXPECT_NO_THROW(ur.validate());
    for (int h : ur.h_ids()) {
      EXPECT_EQ(ur.dag.children(h).size(), 2u) << "seed " << seed;
    }
  }

  cfg.q = 6;
  cfg.l = 2;
  cfg.p_e = 0.4;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    cfg.seed = seed;
    SemUrModel ur = gen_sem_ur(cfg);
    EXPECT_EQ(ur.x_ids().size(), 6u);
    EXPECT_EQ(ur.h_ids().size(), 2u);
    for (int h : ur.h_ids()) {
      EXPECT_GE(ur.dag.children(h).size(), 2u) << "seed " << seed;
    }
  }
}

TEST(PerturbTest, zero_noise_is_the_identity) {
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  MixingMatrix out = perturb_mixing(mix, 0.0, 99);
  EXPECT_EQ(out.values, mix.values);
  ASSERT_TRUE(out.col_labels.has_value());
  EXPECT_EQ(*out.col_labels, *mix.col_labels);
}

TEST(PerturbTest, noise_statistics_match_the_two_stages) {
  MixingMatrix ones;
  ones.values = Eigen::MatrixXd::Ones(100, 100);
  ones.row_labels.assign(100, "r");
  MixingMatrix noisy = perturb_mixing(ones, 0.1, 4);
  EXPECT_FALSE(noisy.col_labels.has_value());
  Eigen::ArrayXXd diff = (noisy.values - ones.values).array();
  double mean = diff.mean();
  double var = (diff - mean).square().mean();
  // Every entry is hit once, a fifth of them twice: 1.2 * d^2.
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(var, 0.012, 0.001);

  MixingMatrix zeros;
  zeros.values = Eigen::MatrixXd::Zero(100, 100);
  zeros.row_labels.assign(100, "r");
  MixingMatrix sparse = perturb_mixing(zeros, 0.1, 5);
  double touched =
      (sparse.values.array() != 0.0).count() / static_cast<double>(100 * 100);
  EXPECT_NEAR(touched, 0.2, 0.02);
}

TEST(SampleTest, single_measurement_is_plain_uniform_noise) {
  SemMeModel me;
  testing::add_z(me.dag, 1);
  attach_measurements(me);
  me = canonicalize_me(me);

  DataMatrix data = sample_data(me, 20000, 17);
  ASSERT_EQ(data.col_names, (std::vector<std::string>{"U1"}));
  ASSERT_EQ(data.values.rows(), 20000);
  Eigen::ArrayXd col = data.values.col(0).array();
  EXPECT_LE(col.maxCoeff(), 0.5);
  EXPECT_GE(col.minCoeff(), -0.5);
  EXPECT_NEAR(col.mean(), 0.0, 0.01);
  EXPECT_NEAR((col - col.mean()).square().mean(), 1.0 / 12.0, 0.005);
}

TEST(SampleTest, covariance_matches_the_overall_mixing) {
  SemMeModel me = testing::cancelling_diamond();
  const int n = 200000;
  DataMatrix data = sample_data(me, n, 29);
  EXPECT_EQ(data.col_names,
            (std::vector<std::string>{"U1", "U2", "U3", "U4"}));

  Eigen::MatrixXd w = overall_mixing_me(me).values;
  Eigen::MatrixXd expected = w * w.transpose() / 12.0;
  Eigen::MatrixXd sample = data.values.transpose() * data.values / n;
  EXPECT_LT((sample - expected).cwiseAbs().maxCoeff(), 0.01);
}

TEST(SampleTest, ur_models_and_determinism) {
  SemUrModel ur = testing::shared_latent_pair();
  DataMatrix a = sample_data(ur, 50, 3);
  DataMatrix b = sample_data(ur, 50, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.col_names, (std::vector<std::string>{"X1", "X2"}));
  DataMatrix c = sample_data(ur, 50, 4);
  EXPECT_NE(a.values, c.values);

  const int n = 100000;
  DataMatrix data = sample_data(ur, n, 31);
  Eigen::MatrixXd w = mixing_ur(ur).values;
  Eigen::MatrixXd expected = w * w.transpose() / 12.0;
  Eigen::MatrixXd sample = data.values.transpose() * data.values / n;
  EXPECT_LT((sample - expected).cwiseAbs().maxCoeff(), 0.01);
}

TEST(ShuffleTest, permutation_carries_values_and_labels) {
  MixingMatrix mix = overall_mixing_me(testing::cancelling_diamond());
  ShuffledMixing shuffled = shuffle_mixing(mix, 8);

  std::vector<int> rows = shuffled.row_perm;
  std::sort(rows.begin(), rows.end());
  std::vector<int> expected_rows(mix.rows());
  std::iota(expected_rows.begin(), expected_rows.end(), 0);
  EXPECT_EQ(rows, expected_rows);

  std::vector<int> cols = shuffled.col_perm;
  std::sort(cols.begin(), cols.end());
  std::vector<int> expected_cols(mix.cols());
  std::iota(expected_cols.begin(), expected_cols.end(), 0);
  EXPECT_EQ(cols, expected_cols);

  for (int i = 0; i < mix.rows(); ++i) {
    EXPECT_EQ(shuffled.mix.row_labels[i], mix.row_labels[shuffled.row_perm[i]]);
    for (int j = 0; j < mix.cols(); ++j) {
      EXPECT_EQ(shuffled.mix.values(i, j),
                mix.values(shuffled.row_perm[i], shuffled.col_perm[j]));
    }
  }
  ASSERT_TRUE(shuffled.mix.col_labels.has_value());
  for (int j = 0; j < mix.cols(); ++j) {
    EXPECT_EQ((*shuffled.mix.col_labels)[j],
              (*mix.col_labels)[shuffled.col_perm[j]]);
  }

  ShuffledMixing again = shuffle_mixing(mix, 8);
  EXPECT_EQ(again.row_perm, shuffled.row_perm);
  EXPECT_EQ(again.col_perm, shuffled.col_perm);
}

}  // namespace
}  // namespace causamix
