//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "ligpose/metrics.h"
#include "ligpose/net.h"
#include "testing.h"

using namespace ligpose;
using namespace ligpose::ad;

namespace {

NetConfig small_config() {
  NetConfig c;
  c.d_f = 16;
  c.d_e = 8;
  c.n_heads = 2;
  c.n_layers = 2;
  c.n_cycles = 2;
  c.n_ens = 3;
  c.d_r = 8;
  return c;
}

ComplexGraph graph_of(const SynthComplex &c) {
  return featurize(select_pocket(c.protein, c.ligand), c.ligand);
}

std::vector<double> max_abs_diff(std::span<const double> a,
                                 std::span<const double> b) {
  double m = 0;
  for (size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a[k] - b[k]));
  return { m };
}

}  // namespace

TEST(Net, RbfLayout) {
  const NetConfig cfg;
  const auto c = rbf_centers(cfg);
  ASSERT_EQ(c.size(), 16u);
  EXPECT_DOUBLE_EQ(c.front(), 0.0);
  EXPECT_DOUBLE_EQ(c.back(), 2.0);
  EXPECT_DOUBLE_EQ(rbf_width(cfg), c[1] - c[0]);
}

TEST(Net, LightConfigDefaults) {
  const NetConfig cfg;
  EXPECT_EQ(cfg.d_f, 160);
  EXPECT_EQ(cfg.d_e, 80);
  EXPECT_EQ(cfg.n_heads, 4);
  EXPECT_EQ(cfg.n_layers, 6);
  EXPECT_EQ(cfg.n_cycles, 3);
  EXPECT_EQ(cfg.n_ens, 10);
  EXPECT_EQ(cfg.d_r, 16);
  EXPECT_EQ(cfg.leaky_slope, 0.01);
  NetConfig bad = cfg;
  bad.n_heads = 7;  // d_f not divisible
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(Net, GateModes) {
  const NetConfig cfg = small_config();
  const ParamSet p = init_params(cfg, 1);
  std::mt19937_64 rng(2);
  const Tensor fresh = fx::random_tensor({ 3, cfg.d_f }, rng);
  const Tensor prev = fx::random_tensor({ 3, cfg.d_f }, rng);
  const std::string name = block_name(0) + ".gf1";
  const Tensor closed = gate(p, name, fresh, prev, GateMode::kClosed);
  const Tensor open = gate(p, name, fresh, prev, GateMode::kOpen);
  const Tensor want_closed = affine_norm(p, name, prev);
  const Tensor want_open = affine_norm(p, name, add(fresh, prev));
  EXPECT_LT(max_abs_diff(closed.data(), want_closed.data())[0], 1e-15);
  EXPECT_LT(max_abs_diff(open.data(), want_open.data())[0], 1e-15);
}

TEST(Net, ProteinCoordinatesFixed) {
  const NetConfig cfg = small_config();
  const ParamSet p = init_params(cfg, 3);
  const ComplexGraph g = graph_of(fx::tiny_complex(1));
  PassOptions o;
  o.seed = 5;
  const PassResult r = run_pass(p, cfg, g, o);
  for (size_t k = g.num_ligand * 3; k < g.coords.size(); ++k)
    EXPECT_EQ(r.coords[k], g.coords[k]);
  bool moved = false;
  const ComplexGraph init = init_ligand_coords(g, mix_seed(5, 0), cfg.init_sigma);
  for (int k = 0; k < g.num_ligand * 3; ++k)
    moved = moved || r.coords[k] != init.coords[k];
  EXPECT_TRUE(moved);
}

TEST(Net, LigandUpdateCount) {
  NetConfig cfg = small_config();
  cfg.n_layers = 6;
  cfg.n_cycles = 4;
  const ParamSet p = init_params(cfg, 3);
  PassOptions o;
  const PassResult r = run_pass(p, cfg, graph_of(fx::tiny_complex(2)), o);
  EXPECT_EQ(r.ligand_updates(), 24);
  EXPECT_EQ(r.cycles.size(), 4u);
}

TEST(Net, CarryMismatchRejected) {
  const NetConfig cfg = small_config();
  const ParamSet p = init_params(cfg, 3);
  const ComplexGraph g1 = graph_of(fx::tiny_complex(1));
  const ComplexGraph g2 = graph_of(synth_complex("big", 4));
  const SubGraph s1 = sample_subgraph(g1, cfg.max_nodes, 1);
  const SubGraph s2 = sample_subgraph(g2, cfg.max_nodes, 1);
  const std::vector<double> m1(s1.graph.num_nodes, 1.0);
  const BlockTrace t1 = forward_cycle(
      p, cfg, s1, Tensor({ s1.graph.num_nodes, 3 }, s1.graph.coords), m1);
  const Carry carry = make_carry(t1, s1);
  const std::vector<double> m2(s2.graph.num_nodes, 1.0);
  EXPECT_THROW(forward_cycle(p, cfg, s2,
                             Tensor({ s2.graph.num_nodes, 3 }, s2.graph.coords),
                             m2, &carry),
               ShapeError);
}

TEST(Net, EquivarianceSmall) {
  const NetConfig cfg = small_config();
  const ParamSet p = init_params(cfg, 8);
  std::mt19937_64 rng(4);
  for (uint64_t s = 0; s < 3; ++s) {
    const SynthComplex c = synth_complex("e", s);
    const ComplexGraph g = graph_of(c);
    const Eigen::Matrix3d rot = fx::random_rotation(rng);
    const Eigen::Vector3d t(0.7, -1.2, 0.4);  // scaled units
    const std::vector<double> x0 = init_ligand_coords(g, 17).coords;
    ComplexGraph gt = g;
    gt.coords = fx::transform(g.coords, rot, t);
    PassOptions a, b;
    a.seed = b.seed = 3;
    a.init_coords = x0;
    b.init_coords = fx::transform(x0, rot, t);
    const PassResult ra = run_pass(p, cfg, g, a);
    const PassResult rb = run_pass(p, cfg, gt, b);
    const auto want = fx::transform(ra.coords, rot, t);
    EXPECT_LT(max_abs_diff(want, rb.coords)[0], 1e-10);
    EXPECT_NEAR(ra.heads.affinity.item(), rb.heads.affinity.item(), 1e-10);
    EXPECT_NEAR(ra.heads.probability.item(), rb.heads.probability.item(), 1e-10);
  }
}

TEST(Net, MedoidOracle) {
  // One-atom poses: RMSD(a,b) = 1, RMSD(a,c) = 1, RMSD(b,c) = 2.
  const std::vector<std::vector<double>> poses { { 0, 0, 0 },
                                                 { 1, 0, 0 },
                                                 { -1, 0, 0 } };
  EquivalentIndexSet id;
  id.perms = { { 0 } };
  EXPECT_EQ(medoid(poses, id), 0);
  EXPECT_THROW(medoid({}, id), std::invalid_argument);
}

TEST(Net, PredictDeterministicAndMedoid) {
  const NetConfig cfg = small_config();
  const ParamSet p = init_params(cfg, 8);
  const SynthComplex c = fx::tiny_complex(3);
  const ComplexGraph g = graph_of(c);
  const EquivalentIndexSet eq = enumerate_equivalent_indexes(c.ligand);
  const PredictionRecord a = predict(p, cfg, g, eq, 11, 1);
  const PredictionRecord b = predict(p, cfg, g, eq, 11, 1);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_EQ(a.affinity, b.affinity);
  EXPECT_EQ(static_cast<int>(a.coords.size()), 3 * c.ligand.num_atoms());
  EXPECT_EQ(static_cast<int>(a.rmsd_trace.size()), cfg.n_cycles * cfg.n_layers);

  const PredictionRecord e = predict(p, cfg, g, eq, 11, 5);
  ASSERT_EQ(e.members.size(), 5u);
  // Offline medoid recomputation.
  int best = 0;
  double best_total = 1e300;
  for (int m = 0; m < 5; ++m) {
    double total = 0;
    for (int k = 0; k < 5; ++k)
      total += symmetric_rmsd(e.members[m], e.members[k], eq);
    if (total < best_total - 1e-12) {
      best_total = total;
      best = m;
    }
  }
  EXPECT_EQ(e.member, best);
  EXPECT_EQ(e.coords, e.members[best]);
  EXPECT_NEAR(e.screening_score, e.probability * e.affinity, 1e-12);
}

TEST(Net, SubgraphRespectsMaxNodes) {
  NetConfig cfg = small_config();
  const SynthComplex c = synth_complex("m", 5);
  const ComplexGraph g = graph_of(c);
  cfg.max_nodes = static_cast<int>(core_nodes(g).size()) + 2;
  const ParamSet p = init_params(cfg, 1);
  const PassResult r = run_pass(p, cfg, g, {});
  for (const CycleRecord &rec: r.cycles)
    EXPECT_LE(rec.sub.graph.num_nodes, cfg.max_nodes);
}
