//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_METRICS_H_
#define LIGPOSE_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "ligpose/symmetry.h"

namespace ligpose {

// Poses are flat [L*3] coordinate arrays in a shared frame; no
// superposition is applied.
double plain_rmsd(std::span<const double> pred, std::span<const double> native);
// Minimum over the equivalent indexes of the RMSD between pred[i] and
// native[perm[i]].
double symmetric_rmsd(std::span<const double> pred,
                      std::span<const double> native,
                      const EquivalentIndexSet &eqset);

// Fraction of values strictly below `threshold`.
double success_rate(std::span<const double> rmsds, double threshold = 2.0);

struct Candidate {
  std::string id;
  double score = 0;
  bool true_binder = false;
  bool best_ligand = false;
};

struct ScreenPanel {
  std::string target;
  std::vector<Candidate> candidates;
};

// Descending score; ties broken by ascending candidate id.
std::vector<Candidate> rank_candidates(const ScreenPanel &panel);
// Size of the top-alpha slice: ceil(alpha * M).
int top_count(int num_candidates, double alpha);

double enrichment_factor(const ScreenPanel &panel, double alpha);
// Fraction of panels whose best ligand ranks inside the top-alpha slice.
double screening_success(std::span<const ScreenPanel> panels, double alpha);

// (1 + |shared|) / (2 + |union|) over the distinct interactions.
double interaction_reproducibility(const std::vector<std::string> &predicted,
                                   const std::vector<std::string> &native);

}  // namespace ligpose

#endif  // LIGPOSE_METRICS_H_
