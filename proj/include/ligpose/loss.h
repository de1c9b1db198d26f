//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_LOSS_H_
#define LIGPOSE_LOSS_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ligpose/net.h"
#include "ligpose/symmetry.h"

namespace ligpose {

struct LossWeights {
  double gamma1 = 1.0;  // symmetric-aware coordinate loss
  double gamma2 = 1.0;  // affinity
  double gamma3 = 1.0;  // screening
};

inline constexpr double kFocalGamma = 2.0;
inline constexpr double kFocalAlpha = 1.0;

// Mean over ligand atoms of |pred_i - native_perm(i)|. pred [L, 3];
// native flat [L*3]. Identity mapping when `perm` is empty.
Tensor coord_loss(const Tensor &pred, std::span<const double> native,
                  std::span<const int> perm = {});

struct SymLoss {
  Tensor value;
  int perm_index = 0;
};
// Index of the permutation minimizing coord_loss (no gradient recorded).
int sym_argmin(std::span<const double> pred, std::span<const double> native,
               const EquivalentIndexSet &eqset);
// min over the set, differentiated through the arg-min permutation.
SymLoss sym_loss(const Tensor &pred, std::span<const double> native,
                 const EquivalentIndexSet &eqset);

Tensor affinity_loss(const Tensor &y_pred, double y_true);

// gamma1 * (mean of blocks 2..N_l-1 + final block) + gamma2 * affinity.
// Ligand rows are the first `num_ligand` rows of every block. Blocks are
// counted from 1; with fewer than three blocks the intermediate mean is 0.
// The affinity term is dropped when `y_aff` is null or `y_true` is unset.
Tensor supervised_loss(const BlockTrace &trace, int num_ligand,
                       std::span<const double> native,
                       const EquivalentIndexSet &eqset, const Tensor *y_aff,
                       std::optional<double> y_true,
                       const LossWeights &weights);

// Mean over rows of -alpha (1 - p_t)^gamma log p_t, p_t = softmax(logits)
// at the target class. logits [M, C].
Tensor focal_loss(const Tensor &logits, std::span<const int64_t> targets,
                  double gamma = kFocalGamma, double alpha = kFocalAlpha);
// Two-class focal loss on a binding logit [1, 1].
Tensor binary_focal_loss(const Tensor &logit, bool label,
                         double gamma = kFocalGamma,
                         double alpha = kFocalAlpha);

/// Masked items of one graph. Node ids are parent-graph indexes; edges are
/// stored once with i < j and masked in both directions.
struct MaskPlan {
  std::vector<int> protein_nodes;
  std::vector<int> ligand_nodes;
  std::vector<std::pair<int, int>> protein_edges;
  std::vector<std::pair<int, int>> ligand_edges;
  std::vector<int> atom_targets;     // per protein node, 37-name class
  std::vector<int> residue_targets;  // per protein node
  std::vector<int> element_targets;  // per ligand node
  std::vector<int> bond_targets;     // protein edges, then ligand edges

  // Every parent node touched by the plan.
  std::vector<int> nodes() const;
};

struct McmOutput {
  Tensor atom_logits;     // [P, 37]
  Tensor residue_logits;  // [P, 20]
  Tensor element_logits;  // [Lm, 10]
  Tensor bond_logits;     // [E, 5]
  Tensor atom, residue, element, bond;  // focal terms, 0 when empty
  Tensor total;
};

// Classification heads on the final block state of a sub-graph that
// contains every node of the plan.
McmOutput mcm_loss(const ParamSet &p, const BlockState &state,
                   const SubGraph &sub, const MaskPlan &plan);

// Mean distance between reconstructed rows `rows` of x [N, 3] and the
// original positions (flat, scaled).
Tensor dpr_loss(const Tensor &x, std::span<const int64_t> rows,
                std::span<const double> original);

Tensor self_loss(const Tensor &mcm, const Tensor &dpr);

}  // namespace ligpose

#endif  // LIGPOSE_LOSS_H_
