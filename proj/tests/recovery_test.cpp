#include "causamix/recovery.hpp"

#include <gtest/gtest.h>

#include <variant>
#include <vector>

#include "causamix/errors.hpp"
#include "causamix/eval.hpp"
#include "causamix/mixing.hpp"
#include "causamix/synth.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace causamix {
namespace {

int nonzero_count(const Eigen::MatrixXd& m, double tol = 1e-9) {
  return static_cast<int>((m.array().abs() > tol).count());
}

const SemMeModel& me_of(const Candidate& cand) {
  return std::get<SemMeModel>(*cand.model);
}

const SemUrModel& ur_of(const Candidate& cand) {
  return std::get<SemUrModel>(*cand.model);
}

TEST(ReconstructMeTest, diamond_true_centers_yield_true_coefficients) {
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  Reconstruction recon = reconstruct_me(mix, {0, 1, 2}, {0, 1, 2});
  Eigen::MatrixXd truth = underlying_adjacency(testing::cancelling_diamond());
  EXPECT_LT((recon.adjacency - truth).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(recon.center_rows, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(recon.loadings.size(), 0);
  EXPECT_GE(recon.cond, 1.0);
  EXPECT_FALSE(recon.cond_warning);
}

TEST(ReconstructMeTest, alternate_center_yields_swapped_coefficients) {
  // Choosing Z4 as the third center reproduces the swapped diamond, whose
  // mixing matrix is identical to the original's.
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  Reconstruction recon = reconstruct_me(mix, {0, 1, 3}, {0, 1, 2});
  Eigen::MatrixXd truth =
      underlying_adjacency(testing::cancelling_diamond_swapped());
  EXPECT_LT((recon.adjacency - truth).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(nonzero_count(recon.adjacency), 5);
}

TEST(ReconstructMeTest, rejects_bad_shapes_and_singular_blocks) {
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  EXPECT_THROW(reconstruct_me(mix, {0, 1}, {0, 1, 2}), ShapeMismatch);
  // Row Z1 has a zero in column N_Z2, so this pivot has a vanishing diagonal.
  EXPECT_THROW(reconstruct_me(mix, {1, 0, 2}, {0, 1, 2}), SingularSubmatrix);
}

TEST(ReconstructUrTest, chain_true_assignment_splits_a_and_b) {
  MixingMatrix mix = mixing_ur(testing::latent_chain_ur());
  Reconstruction recon = reconstruct_ur(mix, {0, 1, 2}, {1, 2, 3});
  Eigen::MatrixXd a(3, 3);
  a << 0, 0, 0, 2, 0, 0, 0, 3, 0;
  EXPECT_LT((recon.adjacency - a).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(recon.loadings.cols(), 1);
  Eigen::VectorXd b(3);
  b << 0, 7, 5;
  EXPECT_LT((recon.loadings.col(0) - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(recon.leftover_cols, (std::vector<int>{0}));
}

TEST(ReconstructUrTest, treating_the_latent_column_as_noise_costs_edges) {
  MixingMatrix mix = mixing_ur(testing::latent_chain_ur());
  Reconstruction recon = reconstruct_ur(mix, {0, 1, 2}, {1, 0, 3});
  Eigen::MatrixXd a(3, 3);
  a << 0, 0, 0, 2, 0, 0, -10.0 / 7.0, 26.0 / 7.0, 0;
  EXPECT_LT((recon.adjacency - a).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd b(3);
  b << 0, 1, -5.0 / 7.0;
  EXPECT_LT((recon.loadings.col(0) - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(nonzero_count(recon.adjacency) + nonzero_count(recon.loadings), 5);
}

TEST(CoefficientsTest, diamond_assignments_build_both_members) {
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  OrderedGrouping grouping = aog_from_mixing(support(mix, kExactZeroTol));

  auto original = coefficients_from_centers(mix, grouping, {0, 1, 2});
  ASSERT_TRUE(std::holds_alternative<SemMeModel>(original));
  const SemMeModel& me = std::get<SemMeModel>(original);
  EXPECT_EQ(me.dag.node(2).name, "Z3");
  EXPECT_EQ(me.u_leaf_ids(), (std::vector<int>{3}));
  EXPECT_LT((underlying_adjacency(me) -
             underlying_adjacency(testing::cancelling_diamond()))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);

  auto swapped = coefficients_from_centers(mix, grouping, {0, 1, 3});
  const SemMeModel& alt = std::get<SemMeModel>(swapped);
  EXPECT_EQ(alt.u_leaf_ids(), (std::vector<int>{2}));
  EXPECT_LT((underlying_adjacency(alt) -
             underlying_adjacency(testing::cancelling_diamond_swapped()))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(CoefficientsTest, cyclic_coefficients_throw) {
  MixingMatrix mix;
  mix.values.resize(2, 2);
  mix.values << 1.0, 0.5, 0.5, 1.0;
  mix.row_labels = {"A", "B"};
  mix.kind = MixingKind::Me;
  OrderedGrouping grouping;
  grouping.domain = GroupingDomain::Positions;
  grouping.groups.push_back({{0}, 0, 0});
  grouping.groups.push_back({{1}, 1, 1});
  EXPECT_THROW(coefficients_from_centers(mix, grouping, {0, 1}),
               CycleDetected);
}

TEST(RecoverDogTest, cancelling_diamond_prefers_fewer_edges) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  RecoveryResult result = recover_dog(mix, rc);

  EXPECT_EQ(result.prune_worst, 0.0);
  EXPECT_EQ(result.candidate_edge_counts, (std::vector<int>{6, 5}));
  ASSERT_EQ(result.best.size(), 1u);
  EXPECT_EQ(result.best_index, 0);
  EXPECT_EQ(result.edge_count, 5);
  EXPECT_EQ(result.best[0].centers, (std::vector<int>{0, 1, 3}));

  const SemMeModel& model = me_of(result.best[0]);
  EXPECT_LT((underlying_adjacency(model) -
             underlying_adjacency(testing::cancelling_diamond_swapped()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  // The minimizer is observationally identical to the input.
  EXPECT_LT((mixing_me(model).values - mix.values).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(RecoverDogTest, latent_chain_recovers_truth) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  MixingMatrix mix = mixing_ur(testing::latent_chain_ur());
  RecoveryResult result = recover_dog(mix, rc);

  EXPECT_EQ(result.candidate_edge_counts, (std::vector<int>{5, 4}));
  ASSERT_EQ(result.best.size(), 1u);
  EXPECT_EQ(result.edge_count, 4);
  EXPECT_EQ(result.best[0].centers, (std::vector<int>{1, 2, 3}));

  const SemUrModel& model = ur_of(result.best[0]);
  Eigen::MatrixXd a(3, 3);
  a << 0, 0, 0, 2, 0, 0, 0, 3, 0;
  EXPECT_LT((observed_adjacency(model) - a).cwiseAbs().maxCoeff(), 1e-9);
  Eigen::VectorXd b(3);
  b << 0, 7, 5;
  EXPECT_LT((latent_loadings(model).col(0) - b).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(model.h_ids(), (std::vector<int>{3}));
  EXPECT_EQ(model.dag.node(3).name, "H4");
}

TEST(RecoverDogTest, identity_mixing_yields_edgeless_model) {
  MixingMatrix mix;
  mix.values = Eigen::MatrixXd::Identity(3, 3);
  mix.row_labels = {"A", "B", "C"};
  mix.col_labels = std::vector<std::string>{"N_A", "N_B", "N_C"};
  mix.kind = MixingKind::Me;

  RecoveryResult result = recover_dog(mix);
  ASSERT_EQ(result.best.size(), 1u);
  EXPECT_EQ(result.edge_count, 0);
  const SemMeModel& model = me_of(result.best[0]);
  EXPECT_TRUE(model.dag.edges().empty());
  EXPECT_EQ(model.dag.node(1).name, "B");
}

TEST(RecoverDogTest, shared_latent_pair_has_two_minimizers) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  RecoveryResult result =
      recover_dog(mixing_ur(testing::shared_latent_pair()), rc);

  ASSERT_EQ(result.best.size(), 2u);
  EXPECT_EQ(result.edge_count, 3);
  EXPECT_EQ(result.best[0].centers, (std::vector<int>{0, 2}));
  EXPECT_EQ(result.best[1].centers, (std::vector<int>{1, 2}));
  EXPECT_EQ(result.best_index, 0);

  EXPECT_NEAR(observed_adjacency(ur_of(result.best[0]))(1, 0), 1.4, 1e-9);
  Eigen::VectorXd flipped(2);
  flipped << 1.0, -0.6;
  EXPECT_LT((latent_loadings(ur_of(result.best[0])).col(0) - flipped)
                .cwiseAbs()
                .maxCoeff(),
            1e-9);

  EXPECT_NEAR(observed_adjacency(ur_of(result.best[1]))(1, 0), 0.8, 1e-9);
  Eigen::VectorXd truth(2);
  truth << 1.0, 0.6;
  EXPECT_LT((latent_loadings(ur_of(result.best[1])).col(0) - truth)
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(RecoverDogTest, candidates_reproduce_the_input_mixing) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  for (std::uint64_t seed = 500; seed < 510; ++seed) {
    GenConfig cfg;
    cfg.p = 6;
    cfg.seed = seed;
    SemMeModel me = gen_sem_me(cfg);
    MixingMatrix mix = mixing_me(me);
    RecoveryResult result = recover_dog(mix, rc);
    EXPECT_EQ(result.prune_worst, 0.0);
    EXPECT_LE(result.edge_count, nonzero_count(underlying_adjacency(me)));
    for (const Candidate& cand : result.best) {
      ASSERT_TRUE(cand.model.has_value());
      double err =
          testing::column_match_error(mixing_me(me_of(cand)).values, mix.values);
      EXPECT_LT(err, 1e-8) << "seed " << seed;
    }
  }
  for (std::uint64_t seed = 600; seed < 610; ++seed) {
    GenConfig cfg;
    cfg.q = 5;
    cfg.l = 2;
    cfg.seed = seed;
    SemUrModel ur = gen_sem_ur(cfg);
    MixingMatrix mix = mixing_ur(ur);
    RecoveryResult result = recover_dog(mix, rc);
    int truth_edges = nonzero_count(observed_adjacency(ur)) +
                      nonzero_count(latent_loadings(ur));
    EXPECT_LE(result.edge_count, truth_edges);
    for (const Candidate& cand : result.best) {
      ASSERT_TRUE(cand.model.has_value());
      double err =
          testing::column_match_error(mixing_ur(ur_of(cand)).values, mix.values);
      EXPECT_LT(err, 1e-8) << "seed " << seed;
    }
  }
}

TEST(RecoverAogTest, baseline_is_deterministic_and_inside_the_class) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  MixingMatrix mix = mixing_me(testing::cancelling_diamond());
  RecoveryResult first = recover_aog_baseline(mix, 7, rc);
  RecoveryResult second = recover_aog_baseline(mix, 7, rc);
  ASSERT_EQ(first.best.size(), 1u);
  EXPECT_EQ(first.best[0].centers, second.best[0].centers);
  bool known = first.best[0].centers == std::vector<int>{0, 1, 2} ||
               first.best[0].centers == std::vector<int>{0, 1, 3};
  EXPECT_TRUE(known);
}

TEST(RecoverAogTest, singleton_class_matches_dog) {
  RecoverConfig rc;
  rc.edge_threshold = kExactZeroTol;
  MixingMatrix mix = mixing_me(testing::collider_me());
  RecoveryResult dog = recover_dog(mix, rc);
  RecoveryResult aog = recover_aog_baseline(mix, 123, rc);
  ASSERT_EQ(dog.best.size(), 1u);
  ASSERT_EQ(aog.best.size(), 1u);
  EXPECT_EQ(dog.best[0].centers, aog.best[0].centers);
  EXPECT_EQ(dog.edge_count, 2);
  EXPECT_LT((underlying_adjacency(me_of(aog.best[0])) -
             underlying_adjacency(testing::collider_me()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(DogMembersTest, diamond_class_lists_original_then_swapped) {
  std::vector<SemMeModel> members =
      dog_equivalence_members(testing::cancelling_diamond());
  ASSERT_EQ(members.size(), 2u);
  EXPECT_LT((underlying_adjacency(members[0]) -
             underlying_adjacency(testing::cancelling_diamond()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  EXPECT_LT((underlying_adjacency(members[1]) -
             underlying_adjacency(testing::cancelling_diamond_swapped()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(DogMembersTest, vee_class_swaps_the_covered_leaf) {
  std::vector<SemMeModel> members =
      dog_equivalence_members(testing::measured_vee());
  ASSERT_EQ(members.size(), 2u);
  EXPECT_LT((underlying_adjacency(members[0]) -
             underlying_adjacency(testing::measured_vee()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  EXPECT_LT((underlying_adjacency(members[1]) -
             underlying_adjacency(testing::measured_vee_swapped()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(DogMembersTest, identifiable_chain_is_its_own_class) {
  std::vector<SemUrModel> members =
      dog_equivalence_members(testing::latent_chain_ur());
  ASSERT_EQ(members.size(), 1u);
  EXPECT_LT((observed_adjacency(members[0]) -
             observed_adjacency(testing::latent_chain_ur()))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(DogMembersTest, shared_pair_keeps_input_first) {
  std::vector<SemUrModel> members =
      dog_equivalence_members(testing::shared_latent_pair());
  ASSERT_EQ(members.size(), 2u);
  EXPECT_NEAR(observed_adjacency(members[0])(1, 0), 0.8, 1e-9);
  EXPECT_NEAR(observed_adjacency(members[1])(1, 0), 1.4, 1e-9);
}

}  // namespace
}  // namespace causamix
