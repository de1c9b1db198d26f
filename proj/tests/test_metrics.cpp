//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "ligpose/metrics.h"
#include "testing.h"

using namespace ligpose;

namespace {

ScreenPanel panel_with(int total, const std::vector<int> &true_ranks) {
  // Candidate k has score total - k, so rank == index.
  ScreenPanel p;
  p.target = "t";
  for (int k = 0; k < total; ++k) {
    Candidate c;
    char id[16];
    std::snprintf(id, sizeof(id), "c%03d", k);
    c.id = id;
    c.score = total - k;
    p.candidates.push_back(c);
  }
  for (int r: true_ranks)
    p.candidates[r].true_binder = true;
  return p;
}

}  // namespace

TEST(SuccessRate, Examples) {
  const std::vector<double> r { 1.0, 2.5, 0.5 };
  EXPECT_DOUBLE_EQ(success_rate(r), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(success_rate(r, 4.0), 1.0);
  EXPECT_THROW(success_rate(std::vector<double> {}), std::invalid_argument);
  // Threshold is strict.
  EXPECT_DOUBLE_EQ(success_rate(std::vector<double> { 2.0 }), 0.0);
}

TEST(Rmsd, PlainAndSymmetric) {
  const std::vector<double> a { 0, 0, 0, 1, 0, 0 };
  const std::vector<double> b { 0, 0, 1, 1, 0, 1 };
  EXPECT_DOUBLE_EQ(plain_rmsd(a, b), 1.0);
  const LigandMol ph = fx::phenol();
  const EquivalentIndexSet eq = enumerate_equivalent_indexes(ph);
  const std::vector<double> nat = fx::flat(ph);
  std::vector<double> flipped(nat.size());
  for (int i = 0; i < 7; ++i)
    for (int c = 0; c < 3; ++c)
      flipped[i * 3 + c] = nat[eq.perms[1][i] * 3 + c];
  EXPECT_NEAR(symmetric_rmsd(flipped, nat, eq), 0.0, 1e-12);
  EXPECT_GT(plain_rmsd(flipped, nat), 1.0);
}

TEST(Rmsd, SymmetryAndRigidInvariance) {
  std::mt19937_64 rng(3);
  const LigandMol ph = fx::phenol();
  const EquivalentIndexSet eq = enumerate_equivalent_indexes(ph);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = fx::random_tensor({ 7, 3 }, rng, -4, 4);
    const Tensor b = fx::random_tensor({ 7, 3 }, rng, -4, 4);
    const std::vector<double> av(a.data().begin(), a.data().end());
    const std::vector<double> bv(b.data().begin(), b.data().end());
    EXPECT_NEAR(symmetric_rmsd(av, bv, eq), symmetric_rmsd(bv, av, eq), 1e-12);
    const Eigen::Matrix3d rot = fx::random_rotation(rng);
    const Eigen::Vector3d t(1, 2, 3);
    EXPECT_NEAR(symmetric_rmsd(fx::transform(av, rot, t),
                               fx::transform(bv, rot, t), eq),
                symmetric_rmsd(av, bv, eq), 1e-10);
  }
}

TEST(Enrichment, Examples) {
  // 100 candidates, 10 true binders, 5 of them in the top 10.
  const ScreenPanel p = panel_with(100, { 0, 2, 4, 6, 8, 50, 60, 70, 80, 90 });
  EXPECT_DOUBLE_EQ(enrichment_factor(p, 0.10), 5.0);
  // Saturation.
  const ScreenPanel best = panel_with(100, { 0 });
  EXPECT_DOUBLE_EQ(enrichment_factor(best, 0.01), 100.0);
  EXPECT_THROW(enrichment_factor(panel_with(10, {}), 0.1), std::invalid_argument);
  EXPECT_EQ(top_count(100, 0.01), 1);
  EXPECT_EQ(top_count(101, 0.01), 2);
  EXPECT_EQ(top_count(30, 0.1), 3);
}

TEST(Enrichment, RankTiesBrokenById) {
  ScreenPanel p;
  for (const char *id: { "b", "a", "c" })
    p.candidates.push_back({ id, 1.0, false, false });
  const auto ranked = rank_candidates(p);
  EXPECT_EQ(ranked[0].id, "a");
  EXPECT_EQ(ranked[1].id, "b");
  EXPECT_EQ(ranked[2].id, "c");
}

TEST(Enrichment, MonotoneTransformInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  std::bernoulli_distribution coin(0.2);
  for (int trial = 0; trial < 50; ++trial) {
    ScreenPanel p;
    for (int k = 0; k < 60; ++k)
      p.candidates.push_back({ "c" + std::to_string(k), u(rng), coin(rng), false });
    p.candidates[trial % 60].true_binder = true;
    p.candidates[trial % 60].best_ligand = true;
    ScreenPanel q = p;
    for (Candidate &c: q.candidates)
      c.score = std::exp(2 * c.score) + 5;
    for (double a: { 0.01, 0.05, 0.10 }) {
      EXPECT_EQ(enrichment_factor(p, a), enrichment_factor(q, a));
      EXPECT_EQ(screening_success(std::span(&p, 1), a),
                screening_success(std::span(&q, 1), a));
    }
  }
}

TEST(ScreeningSuccess, TopRankCounts) {
  ScreenPanel first = panel_with(100, { 0 });
  first.candidates[0].best_ligand = true;
  ScreenPanel second = panel_with(100, { 1 });
  second.candidates[1].best_ligand = true;
  EXPECT_DOUBLE_EQ(screening_success(std::span(&first, 1), 0.01), 1.0);
  EXPECT_DOUBLE_EQ(screening_success(std::span(&second, 1), 0.01), 0.0);
  const std::vector<ScreenPanel> both { first, second };
  EXPECT_DOUBLE_EQ(screening_success(both, 0.01), 0.5);
}

TEST(InteractionReproducibility, Examples) {
  EXPECT_DOUBLE_EQ(interaction_reproducibility({}, {}), 0.5);
  EXPECT_DOUBLE_EQ(interaction_reproducibility({ "a", "b", "c", "d" },
                                               { "a", "b", "c" }),
                   4.0 / 6.0);
  const std::vector<std::string> k { "x", "y", "z" };
  EXPECT_DOUBLE_EQ(interaction_reproducibility(k, k), 4.0 / 5.0);
  EXPECT_LT(interaction_reproducibility(k, k), 1.0);
}
