//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "ligpose/checkpoint.h"
#include "ligpose/graph.h"
#include "ligpose/trainer.h"
#include "testing.h"

using namespace ligpose;

namespace {

const ComplexGraph &toy_graph() {
  static const ComplexGraph g =
      make_sample(synth_complex("m", 11, {}), SampleKind::kLabeled).graph;
  return g;
}

TrainConfig tiny_train(uint64_t seed) {
  TrainConfig t;
  t.lr = 1e-3;
  t.seed = seed;
  return t;
}

std::vector<Sample> tiny_samples() {
  std::vector<Sample> out;
  for (uint64_t s: { 1u, 2u })
    out.push_back(make_sample(fx::tiny_complex(s), SampleKind::kLabeled));
  return out;
}

}  // namespace

TEST(Mask, FrequencyMatchesRatio) {
  const ComplexGraph &g = toy_graph();
  int64_t eligible = 0, masked = 0;
  for (uint64_t seed = 0; seed < 400; ++seed) {
    const MaskResult m = apply_mask(g, 0.15, seed);
    masked += static_cast<int64_t>(m.plan.protein_nodes.size());
    eligible += g.num_nodes - g.num_ligand;
  }
  EXPECT_NEAR(static_cast<double>(masked) / eligible, 0.15, 0.02);
}

TEST(Mask, ZeroesRowsAndKeepsDistances) {
  const ComplexGraph &g = toy_graph();
  const MaskResult m = apply_mask(g, 0.15, 5);
  ASSERT_FALSE(m.plan.protein_nodes.empty());
  ASSERT_FALSE(m.plan.ligand_nodes.empty());
  EXPECT_GE(m.plan.protein_edges.size(), 2u);
  EXPECT_GE(m.plan.ligand_edges.size(), 2u);
  for (int i: m.plan.protein_nodes)
    for (int k = 0; k < kNodeFeatDim; ++k)
      EXPECT_EQ(m.graph.node_row(i)[k], 0.0);
  for (auto [i, j]: m.plan.ligand_edges) {
    EXPECT_EQ(m.graph.edge(i, j)[edge_feat::kCovalent], 0.0);
    EXPECT_EQ(m.graph.edge(i, j)[edge_feat::kDistance],
              g.edge(i, j)[edge_feat::kDistance]);
  }
  EXPECT_EQ(m.plan.atom_targets.size(), m.plan.protein_nodes.size());
  EXPECT_EQ(m.plan.bond_targets.size(),
            m.plan.protein_edges.size() + m.plan.ligand_edges.size());
}

TEST(Noise, DisplacementStd) {
  const ComplexGraph &g = toy_graph();
  double s2 = 0;
  int64_t n = 0;
  for (uint64_t seed = 0; seed < 4000; ++seed) {
    const NoiseResult r = apply_noise(g, 2.0, 0.15, seed);
    for (size_t k = 0; k < r.noised.size(); ++k)
      for (int c = 0; c < 3; ++c) {
        const double d = (r.graph.coords[r.noised[k] * 3 + c] - r.originals[k * 3 + c])
                         / kCoordScale;
        s2 += d * d;
        ++n;
      }
  }
  const double sd = std::sqrt(s2 / n);
  EXPECT_GE(sd, 1.96);
  EXPECT_LE(sd, 2.04);
}

TEST(Noise, LeavesLigandUntouched) {
  const ComplexGraph &g = toy_graph();
  const NoiseResult r = apply_noise(g, 2.0, 0.15, 1);
  for (int i = 0; i < g.num_ligand * 3; ++i)
    EXPECT_EQ(r.graph.coords[i], g.coords[i]);
  for (int i: r.noised)
    EXPECT_GE(i, g.num_ligand);
}

TEST(Trainer, CycleDrawUniform) {
  NetConfig net;
  const Trainer t(net, TrainConfig {}, ParamSet {});
  std::mt19937_64 rng(4);
  std::array<int, 4> counts {};
  const int n = 30000;
  for (int k = 0; k < n; ++k)
    ++counts[t.draw_cycle(rng)];
  EXPECT_EQ(counts[0], 0);
  for (int c = 1; c <= 3; ++c)
    EXPECT_NEAR(counts[c] / static_cast<double>(n), 1.0 / 3.0, 0.02);
}

TEST(Manifest, ParseAndFormat) {
  const std::string tsv =
      "complex_id\tuniprot_id\tprotein_name\tligand_code\taffinity\tsplit\n"
      "1abc\tP1\tkinase\tATP\t6.5\ttrain\n"
      "2xyz\tP2\tprotease\tX1\tNA\ttest\n";
  const PairManifest m = parse_manifest(tsv);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].ligand_code, "ATP");
  EXPECT_DOUBLE_EQ(*m[0].affinity, 6.5);
  EXPECT_FALSE(m[1].affinity.has_value());
  EXPECT_EQ(format_manifest(m), tsv);
  EXPECT_THROW(parse_manifest("id\tfoo\n"), InputError);
  EXPECT_THROW(parse_manifest(tsv + "3\tP\tn\tL\tabc\ttrain\n"), InputError);
}

TEST(ScreenPairs, Labels) {
  const PairManifest m = parse_manifest(
      "complex_id\tuniprot_id\tprotein_name\tligand_code\taffinity\tsplit\n"
      "a\tP1\tkinase\tL1\t5\ttrain\n"
      "b\tP1\tkinase\tL2\t5\ttrain\n"
      "c\tP2\tprotease\tL3\t5\ttrain\n"
      "d\tP3\tother\tL1\t5\ttest\n");
  const auto pairs = label_screening_pairs(m, "train");
  ASSERT_EQ(pairs.size(), 9u);
  auto label = [&](int p, int l) {
    for (const ScreenPair &s: pairs)
      if (s.protein == p && s.ligand == l)
        return s.label;
    ADD_FAILURE() << "missing pair";
    return false;
  };
  EXPECT_TRUE(label(0, 0));
  EXPECT_TRUE(label(0, 1));  // same UniProt entry
  EXPECT_FALSE(label(0, 2));
  EXPECT_TRUE(label(2, 2));
  EXPECT_FALSE(label(2, 0));
  // Ligand code L1 also binds P3 in the test split.
  const auto all = label_screening_pairs(m);
  EXPECT_EQ(all.size(), 16u);

  ScreenPairStream stream(m, 3, "train");
  const auto batch = stream.next_batch(6);
  int pos = 0;
  for (const ScreenPair &s: batch)
    pos += s.label;
  EXPECT_EQ(pos, 3);
}

TEST(Trainer, ConfigValidation) {
  TrainConfig t;
  t.lr = -1;
  EXPECT_THROW(t.validate(), InputError);
  t = TrainConfig {};
  t.mask_ratio = 1.5;
  EXPECT_THROW(t.validate(), InputError);
}

TEST(Trainer, StepIsDeterministicAndLearns) {
  const NetConfig net = fx::small_net_config();
  const auto samples = tiny_samples();
  auto run = [&](int steps) {
    Trainer t(net, tiny_train(9), init_params(net, 2));
    std::vector<double> losses;
    for (int s = 0; s < steps; ++s)
      losses.push_back(t.train_step({ &samples[s % 2] }).loss);
    return losses;
  };
  const auto a = run(6), b = run(6);
  EXPECT_EQ(a, b);
  for (double v: a)
    EXPECT_TRUE(std::isfinite(v));
}

TEST(Trainer, GradientClipBoundsUpdate) {
  const NetConfig net = fx::small_net_config();
  const auto samples = tiny_samples();
  TrainConfig cfg = tiny_train(1);
  cfg.clip_norm = 1e-12;
  Trainer t(net, cfg, init_params(net, 2));
  const ParamSet before = t.params().detached();
  const StepResult r = t.train_step({ &samples[0] });
  EXPECT_GT(r.grad_norm, 0.0);
  // With Adam the first step moves every parameter with a non-zero gradient
  // by at most lr (bias-corrected m/sqrt(v) has magnitude <= 1).
  for (const auto &[name, t0]: before.tensors()) {
    const auto now = t.params()[name].data();
    for (size_t k = 0; k < now.size(); ++k)
      EXPECT_LE(std::abs(now[k] - t0.data()[k]), cfg.lr * (1 + 1e-9)) << name;
  }
  EXPECT_EQ(t.step(), 1);
  EXPECT_EQ(t.adam().t, 1);
}

TEST(Trainer, ResumeMatchesUninterrupted) {
  const NetConfig net = fx::small_net_config();
  const auto samples = tiny_samples();
  Trainer straight(net, tiny_train(4), init_params(net, 2));
  std::vector<double> expect;
  for (int s = 0; s < 4; ++s)
    expect.push_back(straight.train_step({ &samples[s % 2] }).loss);

  Trainer first(net, tiny_train(4), init_params(net, 2));
  first.train_step({ &samples[0] });
  first.train_step({ &samples[1] });
  Checkpoint ck { net, first.params().detached(), first.adam(), first.step(),
                  first.epoch() };
  const Checkpoint back =
      deserialize_checkpoint(serialize_checkpoint(ck, CheckpointDtype::kF64));
  Trainer resumed(back.net, tiny_train(4), back.params);
  resumed.restore(back.step, back.epoch, *back.adam);
  EXPECT_EQ(resumed.step(), 2);
  EXPECT_EQ(resumed.train_step({ &samples[0] }).loss, expect[2]);
  EXPECT_EQ(resumed.train_step({ &samples[1] }).loss, expect[3]);
  EXPECT_EQ(resumed.step(), 4);
}

TEST(Trainer, FitRunsRequestedSteps) {
  const NetConfig net = fx::small_net_config();
  const auto samples = tiny_samples();
  TrainConfig cfg = tiny_train(2);
  cfg.max_steps = 5;
  Trainer t(net, cfg, init_params(net, 2));
  int logged = 0;
  t.fit(samples, {}, [&](const StepResult &) { ++logged; });
  EXPECT_EQ(logged, 5);
  EXPECT_EQ(t.step(), 5);
  EXPECT_THROW(t.fit({}, {}), InputError);
}

TEST(Trainer, LearningRateDecaysPerEpoch) {
  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.lr_decay = 0.5;
  Trainer t(NetConfig {}, cfg, ParamSet {});
  EXPECT_DOUBLE_EQ(t.learning_rate(), 1e-3);
  t.end_epoch();
  t.end_epoch();
  EXPECT_DOUBLE_EQ(t.learning_rate(), 2.5e-4);
}

TEST(Trainer, SelfSupervisedStep) {
  const NetConfig net = fx::small_net_config();
  std::vector<Sample> unl;
  unl.push_back(make_sample(fx::tiny_complex(3), SampleKind::kUnlabeled));
  Trainer t(net, tiny_train(5), init_params(net, 2));
  const StepResult r = t.train_step({ &unl[0] });
  EXPECT_TRUE(r.components.count("dpr"));
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_GT(r.loss, 0.0);
}

TEST(Checkpoint, RoundTripF64AndF32) {
  const NetConfig net = fx::small_net_config();
  Checkpoint ck { net, init_params(net, 7), std::nullopt, 12, 3 };
  const Checkpoint b64 =
      deserialize_checkpoint(serialize_checkpoint(ck, CheckpointDtype::kF64));
  EXPECT_EQ(b64.step, 12);
  EXPECT_EQ(b64.epoch, 3);
  EXPECT_EQ(b64.net.d_f, net.d_f);
  EXPECT_FALSE(b64.adam.has_value());
  const Checkpoint b32 =
      deserialize_checkpoint(serialize_checkpoint(ck, CheckpointDtype::kF32));
  for (const auto &[name, t]: ck.params.tensors()) {
    const auto a = t.data(), x = b64.params[name].data(), y = b32.params[name].data();
    for (size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(x[k], a[k]);
      EXPECT_EQ(y[k], static_cast<double>(static_cast<float>(a[k])));
    }
  }
  EXPECT_THROW(deserialize_checkpoint("garbage"), InputError);
}
