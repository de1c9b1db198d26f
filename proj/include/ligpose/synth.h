//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_SYNTH_H_
#define LIGPOSE_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ligpose/chemio.h"

namespace ligpose {

// Deterministic synthetic protein-ligand complexes for tests and the
// bundled toy set. Geometry is plausible (1.4-1.5 A bonds, no clashes)
// but not physical.
struct SynthOptions {
  int min_ligand_atoms = 6;
  int max_ligand_atoms = 12;
  int num_residues = 6;
  int max_pocket_atoms = 40;
  // Distance of residue C-alpha atoms from the nearest ligand atom.
  double shell_min = 4.0;
  double shell_max = 6.5;
};

struct SynthComplex {
  std::string id;
  LigandMol ligand;
  ProteinChain protein;
  double affinity = 0;  // -log K units
};

SynthComplex synth_complex(const std::string &id, uint64_t seed,
                           const SynthOptions &opts = {});
std::vector<SynthComplex> synth_dataset(int count, uint64_t seed,
                                        const SynthOptions &opts = {},
                                        const std::string &prefix = "toy");

// Random connected heavy-atom molecule (no coordinates of interest) with up
// to `max_atoms` atoms; used by symmetry checks.
LigandMol random_molecule(int max_atoms, uint64_t seed);

}  // namespace ligpose

#endif  // LIGPOSE_SYNTH_H_
