//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_SYMMETRY_H_
#define LIGPOSE_SYMMETRY_H_

#include <string>
#include <vector>

#include "ligpose/chemio.h"

namespace ligpose {

inline constexpr int kDefaultAutomorphismCap = 1000;

/// Automorphisms of the colored heavy-atom graph. perms[k][i] is the
/// native-order index matched to predicted atom i. Sorted
/// lexicographically, so perms[0] is the identity.
struct EquivalentIndexSet {
  std::vector<std::vector<int>> perms;
  bool truncated = false;

  int size() const { return static_cast<int>(perms.size()); }
};

// Atom colors: element, formal charge, aromatic flag, ring sizes. Bond
// colors: bond order.
EquivalentIndexSet enumerate_equivalent_indexes(
    const LigandMol &mol, int cap = kDefaultAutomorphismCap);

std::string automorphisms_to_json(const EquivalentIndexSet &set);

}  // namespace ligpose

#endif  // LIGPOSE_SYMMETRY_H_
