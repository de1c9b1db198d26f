//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_DATASET_H_
#define LIGPOSE_DATASET_H_

#include <string>
#include <vector>

#include "ligpose/synth.h"
#include "ligpose/trainer.h"

namespace ligpose {

// Complex files live next to the manifest as <id>_protein.pdb and
// <id>_ligand.sdf.
std::string protein_path(const std::string &dir, const std::string &id);
std::string ligand_path(const std::string &dir, const std::string &id);

struct ComplexFiles {
  ProteinChain protein;
  LigandMol ligand;
};
ComplexFiles load_complex(const std::string &dir, const std::string &id);

// Graph of a protein's pocket (selected around `site`) with `ligand` as the
// ligand nodes.
ComplexGraph build_graph(const ProteinChain &protein, const LigandMol &site,
                         const LigandMol &ligand, double cutoff);

struct DatasetOptions {
  std::string split;  // empty: every entry
  double cutoff = 15.0;
  int automorphism_cap = kDefaultAutomorphismCap;
};

std::vector<Sample> load_labeled(const std::string &dir,
                                 const PairManifest &manifest,
                                 const DatasetOptions &opts = {});
std::vector<Sample> load_unlabeled(const std::string &dir,
                                   const PairManifest &manifest,
                                   const DatasetOptions &opts = {});
std::vector<Sample> load_screen_pairs(const std::string &dir,
                                      const PairManifest &manifest,
                                      const DatasetOptions &opts = {});

// In-memory versions over synthetic complexes.
Sample make_sample(const SynthComplex &c, SampleKind kind,
                   double cutoff = 15.0);

// Writes <id>_protein.pdb, <id>_ligand.sdf and manifest.tsv.
void write_synth_dataset(const std::string &dir,
                         const std::vector<SynthComplex> &complexes,
                         const std::string &split = "train");

}  // namespace ligpose

#endif  // LIGPOSE_DATASET_H_
