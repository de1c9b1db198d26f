//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_GRAPH_H_
#define LIGPOSE_GRAPH_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ligpose/chemio.h"

namespace ligpose {

// Coordinates (and affinities) are stored at 1/10 of their physical
// value inside graphs and the network.
inline constexpr double kCoordScale = 0.1;

inline constexpr int kProteinFeatDim = 79;
inline constexpr int kLigandFeatDim = 45;
inline constexpr int kNodeFeatDim = kProteinFeatDim;
inline constexpr int kEdgeFeatDim = 7;

// Column offsets of the one-hot groups.
namespace protein_feat {
inline constexpr int kElement = 0;          // C N O S
inline constexpr int kDegree = 4;           // 0..4
inline constexpr int kImplicitValence = 9;  // 0..4
inline constexpr int kNumH = 14;            // 0..4
inline constexpr int kHybridization = 19;   // SP SP2 SP3
inline constexpr int kResidue = 22;         // 20 canonical
inline constexpr int kAtomName = 42;        // 37 names
}  // namespace protein_feat

namespace ligand_feat {
inline constexpr int kElement = 0;          // C N O S P F Cl Br I other
inline constexpr int kDegree = 10;          // 0..5
inline constexpr int kImplicitValence = 16; // 0..4
inline constexpr int kNumH = 21;            // 0..4
inline constexpr int kHybridization = 26;   // SP SP2 SP3 SP3D SP3D2 other
inline constexpr int kCharge = 32;          // -2 -1 0 +1 +2 other
inline constexpr int kRingSize = 38;        // 3..8 (multi-hot)
inline constexpr int kAromatic = 44;
}  // namespace ligand_feat

namespace edge_feat {
inline constexpr int kCovalent = 0;
inline constexpr int kDistance = 1;
inline constexpr int kBondType = 2;  // none single double triple aromatic
inline constexpr int kNumBondTypes = 5;
}  // namespace edge_feat

inline constexpr int kNumLigandElements = 10;

enum class NodeRole : uint8_t {
  kLigand = 0,
  kProteinCore = 1,
  kProteinContext = 2,
};

// Index in the 10-symbol ligand vocabulary; symbols outside the first
// nine map to "other" (9).
int ligand_element_index(std::string_view element);

/// Complete protein-ligand graph. Ligand atoms occupy rows [0, num_ligand);
/// protein atoms follow in pocket residue order. Self edges are included.
struct ComplexGraph {
  int num_nodes = 0;
  int num_ligand = 0;
  std::vector<NodeRole> roles;
  std::vector<int> rigid_part;
  // Protein rows: index into the 37-name vocabulary / residue type; -1 for
  // ligand rows.
  std::vector<int> atom_name;
  std::vector<int> residue_type;
  std::vector<int> residue_index;

  std::vector<double> node_feats;  // [N, kNodeFeatDim]
  std::vector<double> edge_feats;  // [N, N, kEdgeFeatDim]
  std::vector<double> coords;      // [N, 3], scaled
  // Ligand input conformation (scaled). For native complexes this is the
  // crystal pose.
  std::vector<double> ligand_ref;  // [num_ligand, 3]

  int num_protein() const { return num_nodes - num_ligand; }
  bool is_core(int i) const { return roles[i] != NodeRole::kProteinContext; }

  double *node_row(int i) { return node_feats.data() + i * kNodeFeatDim; }
  const double *node_row(int i) const {
    return node_feats.data() + i * kNodeFeatDim;
  }
  double *edge(int i, int j) {
    return edge_feats.data()
           + (static_cast<int64_t>(i) * num_nodes + j) * kEdgeFeatDim;
  }
  const double *edge(int i, int j) const {
    return edge_feats.data()
           + (static_cast<int64_t>(i) * num_nodes + j) * kEdgeFeatDim;
  }

  // Ligand element class; protein atom-name class (symmetry-collapsed),
  // residue class; bond-type class of an edge. Read from the features, so
  // call before masking.
  int ligand_element_class(int i) const;
  int protein_atom_class(int i) const;
  int protein_residue_class(int i) const;
  int bond_type_class(int i, int j) const;

  // Sets the distance channel from current coordinates: the Euclidean
  // distance within a rigid part, -1 across parts.
  void refresh_distance_channel(std::span<const int> nodes = {});
};

// A ligand bond is rotatable when it is an acyclic single bond between two
// atoms of heavy degree >= 2.
bool is_rotatable(const LigandMol &mol, int bond);

// Ligand rigid part per atom: connected components after cutting
// rotatable bonds.
std::vector<int> ligand_rigid_parts(const LigandMol &mol);

ComplexGraph featurize(const Pocket &pocket, const LigandMol &ligand);

// Centroid of the pocket C-alpha nodes (scaled).
std::array<double, 3> pocket_centroid(const ComplexGraph &graph);

// Ligand rows ~ iid Normal(pocket centroid, sigma^2 I); sigma in angstrom.
ComplexGraph init_ligand_coords(const ComplexGraph &graph, uint64_t seed,
                                double sigma_angstrom = 10.0);

struct SubGraph {
  std::vector<int64_t> parent;  // parent index of each sub-graph node
  int num_core = 0;             // core nodes come first
  ComplexGraph graph;
};

// Core nodes: ligand atoms, protein C-alpha/C-beta, and any `extra_core`.
std::vector<int64_t> core_nodes(const ComplexGraph &graph,
                                std::span<const int> extra_core = {});

ComplexGraph restrict_graph(const ComplexGraph &graph,
                            std::span<const int64_t> nodes);

// All core nodes plus a uniform sample (without replacement) of context
// nodes, up to max_nodes in total.
SubGraph sample_subgraph(const ComplexGraph &graph, int max_nodes,
                         uint64_t seed, std::span<const int> extra_core = {});

// Little-endian binary container and JSON debug form.
std::string serialize_graph(const ComplexGraph &graph);
ComplexGraph deserialize_graph(std::string_view bytes);
std::string graph_to_json(const ComplexGraph &graph);

}  // namespace ligpose

#endif  // LIGPOSE_GRAPH_H_
