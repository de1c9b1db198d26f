//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ligpose/graph.h"
#include "testing.h"

using namespace ligpose;

namespace {

// Blank graph with the given role layout; features are zero.
ComplexGraph blank_graph(int ligand, int core, int context) {
  ComplexGraph g;
  g.num_nodes = ligand + core + context;
  g.num_ligand = ligand;
  for (int i = 0; i < g.num_nodes; ++i) {
    g.roles.push_back(i < ligand          ? NodeRole::kLigand
                      : i < ligand + core ? NodeRole::kProteinCore
                                          : NodeRole::kProteinContext);
    g.rigid_part.push_back(i);
    g.atom_name.push_back(i < ligand ? -1 : i < ligand + core ? 1 : 2);
    g.residue_type.push_back(i < ligand ? -1 : 0);
    g.residue_index.push_back(i < ligand ? -1 : i);
  }
  g.node_feats.assign(static_cast<size_t>(g.num_nodes) * kNodeFeatDim, 0.0);
  g.edge_feats.assign(static_cast<size_t>(g.num_nodes) * g.num_nodes
                          * kEdgeFeatDim,
                      0.0);
  g.coords.assign(static_cast<size_t>(g.num_nodes) * 3, 0.0);
  g.ligand_ref.assign(static_cast<size_t>(ligand) * 3, 0.0);
  return g;
}

double group_sum(const double *row, int begin, int len) {
  return std::accumulate(row + begin, row + begin + len, 0.0);
}

ComplexGraph synth_graph(uint64_t seed) {
  const SynthComplex c = synth_complex("g", seed);
  return featurize(select_pocket(c.protein, c.ligand), c.ligand);
}

}  // namespace

TEST(Featurize, DimensionsAndOneHotGroups) {
  EXPECT_EQ(kProteinFeatDim, 4 + 5 + 5 + 5 + 3 + 20 + 37);
  EXPECT_EQ(kLigandFeatDim, 10 + 6 + 5 + 5 + 6 + 6 + 6 + 1);
  EXPECT_EQ(kEdgeFeatDim, 7);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexGraph g = synth_graph(seed);
    for (int i = 0; i < g.num_nodes; ++i) {
      const double *r = g.node_row(i);
      if (i < g.num_ligand) {
        using namespace ligand_feat;
        EXPECT_EQ(group_sum(r, kElement, 10), 1.0);
        EXPECT_EQ(group_sum(r, kDegree, 6), 1.0);
        EXPECT_EQ(group_sum(r, kImplicitValence, 5), 1.0);
        EXPECT_EQ(group_sum(r, kNumH, 5), 1.0);
        EXPECT_EQ(group_sum(r, kHybridization, 6), 1.0);
        EXPECT_EQ(group_sum(r, kCharge, 6), 1.0);
        // Columns past 45 unused for ligand rows.
        EXPECT_EQ(group_sum(r, kLigandFeatDim, kNodeFeatDim - kLigandFeatDim),
                  0.0);
      } else {
        using namespace protein_feat;
        EXPECT_EQ(group_sum(r, kElement, 4), 1.0);
        EXPECT_EQ(group_sum(r, kDegree, 5), 1.0);
        EXPECT_EQ(group_sum(r, kImplicitValence, 5), 1.0);
        EXPECT_EQ(group_sum(r, kNumH, 5), 1.0);
        EXPECT_EQ(group_sum(r, kHybridization, 3), 1.0);
        EXPECT_EQ(group_sum(r, kResidue, 20), 1.0);
        EXPECT_EQ(group_sum(r, kAtomName, 37), 1.0);
      }
    }
  }
}

TEST(Featurize, BenzeneCarbonRingBits) {
  const LigandMol benzene = [] {
    std::vector<LigandAtom> a(6);
    std::vector<LigandBond> b;
    for (int i = 0; i < 6; ++i) {
      a[i].element = "C";
      a[i].aromatic = true;
      a[i].pos = Vector3d(1.39 * std::cos(i * M_PI / 3),
                          1.39 * std::sin(i * M_PI / 3), 0);
      b.push_back({ i, (i + 1) % 6, BondOrder::kAromatic });
    }
    return LigandMol(a, b);
  }();
  const SynthComplex c = synth_complex("b", 1);
  const ComplexGraph g = featurize(select_pocket(c.protein, benzene, 30.0),
                                   benzene);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(g.node_row(i)[ligand_feat::kAromatic], 1.0);
    EXPECT_EQ(g.node_row(i)[ligand_feat::kRingSize + (6 - 3)], 1.0);
    EXPECT_EQ(group_sum(g.node_row(i), ligand_feat::kRingSize, 6), 1.0);
  }
}

TEST(Featurize, RigidPartDistanceMask) {
  // Ring + chain: C1(ring)-C7-C8-O9. C1-C7 is rotatable (both ends have
  // heavy degree >= 2, acyclic, single).
  std::vector<LigandAtom> a(9);
  std::vector<LigandBond> b;
  for (int i = 0; i < 6; ++i) {
    a[i].element = "C";
    a[i].pos = Vector3d(1.5 * std::cos(i * M_PI / 3),
                        1.5 * std::sin(i * M_PI / 3), 0);
    b.push_back({ i, (i + 1) % 6, BondOrder::kSingle });
  }
  a[6] = { "C", 0, Vector3d(3.0, 0, 0), false, 0 };
  a[7] = { "C", 0, Vector3d(4.2, 0.9, 0), false, 0 };
  a[8] = { "O", 0, Vector3d(5.4, 0.0, 0), false, 0 };
  b.push_back({ 0, 6, BondOrder::kSingle });
  b.push_back({ 6, 7, BondOrder::kSingle });
  b.push_back({ 7, 8, BondOrder::kSingle });
  const LigandMol mol(a, b);
  EXPECT_TRUE(is_rotatable(mol, 6));   // ring C0 - C6
  EXPECT_FALSE(is_rotatable(mol, 0));  // ring bond
  EXPECT_FALSE(is_rotatable(mol, 8));  // C7 - O8, O terminal

  const SynthComplex c = synth_complex("r", 2);
  const ComplexGraph g = featurize(select_pocket(c.protein, mol, 30.0), mol);
  EXPECT_EQ(g.edge(0, 6)[edge_feat::kDistance], -1.0);
  EXPECT_EQ(g.edge(6, 0)[edge_feat::kDistance], -1.0);
  EXPECT_NEAR(g.edge(0, 3)[edge_feat::kDistance],
              (a[0].pos - a[3].pos).norm() * kCoordScale, 1e-12);
  EXPECT_NEAR(g.edge(7, 8)[edge_feat::kDistance],
              (a[7].pos - a[8].pos).norm() * kCoordScale, 1e-12);
  // Ligand/protein pairs are always in different rigid parts.
  EXPECT_EQ(g.edge(0, g.num_ligand)[edge_feat::kDistance], -1.0);
  // Bond-type channel on a covalent pair.
  EXPECT_EQ(g.edge(0, 6)[edge_feat::kCovalent], 1.0);
  EXPECT_EQ(g.edge(0, 6)[edge_feat::kBondType + 1], 1.0);
}

TEST(Featurize, Invariants) {
  const ComplexGraph g = synth_graph(4);
  for (int i = 0; i < g.num_nodes; ++i) {
    // Self edge: distance 0 within the node's own rigid part.
    EXPECT_EQ(g.edge(i, i)[edge_feat::kDistance], 0.0);
    for (int j = 0; j < g.num_nodes; ++j)
      for (int c = 0; c < kEdgeFeatDim; ++c)
        EXPECT_EQ(g.edge(i, j)[c], g.edge(j, i)[c]);
  }
  EXPECT_EQ(static_cast<int>(g.coords.size()), 3 * g.num_nodes);
}

TEST(Featurize, RigidTransformInvariance) {
  std::mt19937_64 rng(5);
  const SynthComplex c = synth_complex("t", 9);
  const Pocket pocket = select_pocket(c.protein, c.ligand);
  const ComplexGraph g = featurize(pocket, c.ligand);
  const Eigen::Matrix3d rot = fx::random_rotation(rng);
  const Vector3d t(12, -3, 4);
  Pocket moved = pocket;
  for (Residue &r: moved.residues)
    for (ProteinAtom &a: r.atoms)
      a.pos = rot * a.pos + t;
  LigandMol lig = c.ligand;
  std::vector<Vector3d> pos;
  for (const LigandAtom &a: lig.atoms())
    pos.push_back(rot * a.pos + t);
  lig.set_positions(pos);
  const ComplexGraph h = featurize(moved, lig);
  EXPECT_EQ(h.node_feats, g.node_feats);
  ASSERT_EQ(h.edge_feats.size(), g.edge_feats.size());
  for (size_t k = 0; k < g.edge_feats.size(); ++k) {
    if (static_cast<int>(k % kEdgeFeatDim) == edge_feat::kDistance)
      EXPECT_NEAR(h.edge_feats[k], g.edge_feats[k], 1e-12);
    else
      EXPECT_EQ(h.edge_feats[k], g.edge_feats[k]);
  }
}

TEST(Featurize, LigandPermutationPermutesRows) {
  const SynthComplex c = synth_complex("p", 12);
  const Pocket pocket = select_pocket(c.protein, c.ligand);
  const ComplexGraph g = featurize(pocket, c.ligand);
  const int n = c.ligand.num_atoms();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  // New atom k is old atom perm[k].
  std::vector<int> inv(n);
  for (int k = 0; k < n; ++k)
    inv[perm[k]] = k;
  std::vector<LigandAtom> atoms;
  for (int k = 0; k < n; ++k)
    atoms.push_back(c.ligand.atom(perm[k]));
  std::vector<LigandBond> bonds;
  for (const LigandBond &b: c.ligand.bonds())
    bonds.push_back({ inv[b.i], inv[b.j], b.order });
  const ComplexGraph h = featurize(pocket, LigandMol(atoms, bonds));
  auto old_of = [&](int k) { return k < n ? perm[k] : k; };
  for (int i = 0; i < g.num_nodes; ++i) {
    for (int f = 0; f < kNodeFeatDim; ++f)
      ASSERT_EQ(h.node_row(i)[f], g.node_row(old_of(i))[f]);
    for (int j = 0; j < g.num_nodes; ++j)
      for (int e = 0; e < kEdgeFeatDim; ++e)
        ASSERT_EQ(h.edge(i, j)[e], g.edge(old_of(i), old_of(j))[e]);
  }
}

TEST(Featurize, RejectsUnknownLigandElement) {
  std::vector<LigandAtom> a(2);
  a[0].element = "C";
  a[1].element = "Xe";
  a[1].pos = Vector3d(1.5, 0, 0);
  const LigandMol mol(a, { { 0, 1, BondOrder::kSingle } });
  const SynthComplex c = synth_complex("x", 1);
  EXPECT_THROW(featurize(select_pocket(c.protein, mol, 30.0), mol), InputError);
}

TEST(Featurize, NodeCountAndCoreRoles) {
  const SynthComplex c = synth_complex("n", 6);
  const Pocket pocket = select_pocket(c.protein, c.ligand);
  const ComplexGraph g = featurize(pocket, c.ligand);
  int protein_atoms = 0, core = 0;
  for (const Residue &r: pocket.residues) {
    protein_atoms += static_cast<int>(r.atoms.size());
    for (const ProteinAtom &a: r.atoms)
      core += a.name == "CA" || a.name == "CB";
  }
  EXPECT_EQ(g.num_nodes, c.ligand.num_atoms() + protein_atoms);
  int got_core = 0;
  for (int i = g.num_ligand; i < g.num_nodes; ++i)
    got_core += g.roles[i] == NodeRole::kProteinCore;
  EXPECT_EQ(got_core, core);
}

TEST(InitCoords, DeterministicAndDegenerate) {
  const ComplexGraph g = synth_graph(2);
  const ComplexGraph a = init_ligand_coords(g, 42), b = init_ligand_coords(g, 42);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.coords, init_ligand_coords(g, 43).coords);
  const ComplexGraph z = init_ligand_coords(g, 42, 0.0);
  const auto centre = pocket_centroid(g);
  for (int i = 0; i < g.num_ligand; ++i)
    for (int k = 0; k < 3; ++k)
      EXPECT_EQ(z.coords[i * 3 + k], centre[k]);
  // Protein coordinates untouched.
  for (size_t k = g.num_ligand * 3; k < g.coords.size(); ++k)
    EXPECT_EQ(a.coords[k], g.coords[k]);
}

TEST(InitCoords, GaussianMoments) {
  ComplexGraph g = blank_graph(1, 1, 0);
  g.coords = { 0, 0, 0, 0.5, -0.2, 0.3 };  // C-alpha (scaled) at (5, -2, 3) A
  const double centre = 5.0;
  const int samples = 100000;
  double s = 0, s2 = 0;
  for (int k = 0; k < samples; ++k) {
    const double x = init_ligand_coords(g, static_cast<uint64_t>(k)).coords[0]
                     / kCoordScale;
    s += x;
    s2 += x * x;
  }
  const double mean = s / samples;
  const double sd = std::sqrt(s2 / samples - mean * mean);
  EXPECT_NEAR(mean, centre, 0.15);
  EXPECT_GE(sd, 9.8);
  EXPECT_LE(sd, 10.2);
}

TEST(SampleSubgraph, Counting) {
  const ComplexGraph g = blank_graph(8, 12, 50);
  const SubGraph s = sample_subgraph(g, 40, 1);
  EXPECT_EQ(s.num_core, 20);
  EXPECT_EQ(s.graph.num_nodes, 40);
  EXPECT_EQ(s.graph.num_ligand, 8);
  for (int k = 0; k < 20; ++k)
    EXPECT_EQ(s.parent[k], k);
  const SubGraph all = sample_subgraph(g, 500, 1);
  EXPECT_EQ(all.graph.num_nodes, 70);
  EXPECT_THROW(sample_subgraph(g, 19, 1), std::invalid_argument);
}

TEST(SampleSubgraph, UniformContext) {
  const ComplexGraph g = blank_graph(8, 12, 50);
  std::vector<int> hits(g.num_nodes, 0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d)
    for (int64_t p: sample_subgraph(g, 40, static_cast<uint64_t>(d)).parent)
      ++hits[p];
  for (int i = 20; i < 70; ++i)
    EXPECT_NEAR(hits[i] / static_cast<double>(draws), 20.0 / 50.0, 0.05);
}

TEST(SampleSubgraph, RestrictsEdges) {
  const ComplexGraph g = synth_graph(3);
  const int max_nodes = g.num_ligand + 12;
  const SubGraph s = sample_subgraph(g, std::max(max_nodes, g.num_ligand + 10),
                                     9);
  for (int a = 0; a < s.graph.num_nodes; ++a)
    for (int b = 0; b < s.graph.num_nodes; ++b)
      for (int c = 0; c < kEdgeFeatDim; ++c)
        ASSERT_EQ(s.graph.edge(a, b)[c], g.edge(s.parent[a], s.parent[b])[c]);
}

TEST(Serialization, RoundTrip) {
  const ComplexGraph g = init_ligand_coords(synth_graph(5), 3);
  const ComplexGraph h = deserialize_graph(serialize_graph(g));
  EXPECT_EQ(h.num_nodes, g.num_nodes);
  EXPECT_EQ(h.num_ligand, g.num_ligand);
  EXPECT_EQ(h.roles, g.roles);
  EXPECT_EQ(h.rigid_part, g.rigid_part);
  EXPECT_EQ(h.atom_name, g.atom_name);
  EXPECT_EQ(h.residue_type, g.residue_type);
  EXPECT_EQ(h.residue_index, g.residue_index);
  EXPECT_EQ(h.node_feats, g.node_feats);
  EXPECT_EQ(h.edge_feats, g.edge_feats);
  EXPECT_EQ(h.coords, g.coords);
  EXPECT_EQ(h.ligand_ref, g.ligand_ref);
  std::string bytes = serialize_graph(g);
  bytes[0] = 'X';
  EXPECT_THROW(deserialize_graph(bytes), ParseError);
  EXPECT_THROW(deserialize_graph(serialize_graph(g).substr(0, 40)), ParseError);
  EXPECT_FALSE(graph_to_json(g).empty());
}
