//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_CHEMIO_H_
#define LIGPOSE_CHEMIO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ligpose/error.h"

namespace ligpose {

using Vector3d = Eigen::Vector3d;

enum class BondOrder : int {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct LigandAtom {
  std::string element;
  int formal_charge = 0;
  Vector3d pos = Vector3d::Zero();
  bool aromatic = false;
  int implicit_h = 0;
};

struct LigandBond {
  int i;
  int j;
  BondOrder order;
};

/// Heavy-atom ligand graph. Explicit hydrogens of the source file are
/// folded into LigandAtom::implicit_h.
class LigandMol {
public:
  LigandMol() = default;
  LigandMol(std::vector<LigandAtom> atoms, std::vector<LigandBond> bonds);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  const std::vector<LigandAtom> &atoms() const { return atoms_; }
  const std::vector<LigandBond> &bonds() const { return bonds_; }
  const LigandAtom &atom(int i) const { return atoms_[i]; }

  void set_positions(const std::vector<Vector3d> &pos);

  // Indices into bonds() for every bond incident to atom i.
  const std::vector<int> &incident_bonds(int i) const { return incident_[i]; }
  int degree(int i) const { return static_cast<int>(incident_[i].size()); }
  int other_end(int bond, int atom) const;
  // Bond index, or -1.
  int find_bond(int i, int j) const;

  // Bit (k - 3) set when atom i lies on a simple cycle of length k,
  // k in [3, 8].
  uint8_t ring_sizes(int i) const { return ring_sizes_[i]; }
  bool in_ring(int i) const { return ring_sizes_[i] != 0; }
  bool bond_in_ring(int bond) const { return bond_in_ring_[bond]; }

  bool connected() const;

private:
  void build_topology();

  std::vector<LigandAtom> atoms_;
  std::vector<LigandBond> bonds_;
  std::vector<std::vector<int>> incident_;
  std::vector<uint8_t> ring_sizes_;
  std::vector<bool> bond_in_ring_;
};

// Single-record MDL V2000 molfile/SDF block.
LigandMol parse_sdf(std::string_view text);
// Heavy-atom V2000 block, terminated by "M  END" and "$$$$".
std::string emit_sdf(const LigandMol &mol, std::string_view title = "");

struct ProteinAtom {
  std::string name;
  std::string element;
  Vector3d pos;
};

struct Residue {
  std::string name;
  char chain = ' ';
  int seq = 0;
  char icode = ' ';
  std::vector<ProteinAtom> atoms;
  // Peptide bond to the previous / next residue of the chain.
  bool linked_prev = false;
  bool linked_next = false;

  const ProteinAtom *find(std::string_view atom_name) const;
  const ProteinAtom &calpha() const;
};

struct ProteinChain {
  char chain = ' ';
  std::vector<Residue> residues;
};

struct PdbOptions {
  // First chain of the file when unset.
  std::optional<char> chain;
};

ProteinChain parse_pdb(std::string_view text, const PdbOptions &opts = {});
// Fixed-column ATOM records for the chain, ending with "END".
std::string emit_pdb(const ProteinChain &chain);

enum class PocketRule {
  kLigandProximity,
  kExternal,
};

struct Pocket {
  std::vector<Residue> residues;
  PocketRule rule = PocketRule::kLigandProximity;
  double cutoff = 15.0;
};

class EmptyPocketError: public InputError {
public:
  using InputError::InputError;
};

// Residues whose C-alpha lies within `cutoff` angstrom of any ligand atom.
Pocket select_pocket(const ProteinChain &protein, const LigandMol &ligand,
                     double cutoff = 15.0);
// The whole chain, used when the pocket was chosen elsewhere.
Pocket external_pocket(const ProteinChain &protein);

// ---- residue vocabulary --------------------------------------------------

inline constexpr int kNumResidueTypes = 20;
inline constexpr int kNumAtomNames = 37;

// Index in the canonical 20-residue list, or -1.
int residue_type_index(std::string_view name);
std::string_view residue_type_name(int index);

// Index in the 37-entry heavy-atom name vocabulary, or -1.
int atom_name_index(std::string_view name);
std::string_view atom_name(int index);
// Maps symmetry-equivalent side-chain names onto one representative
// (e.g. VAL CG2 -> CG1).
int atom_name_class(std::string_view residue, int atom_name_idx);

struct ResidueAtomChem {
  int num_h;
  int hybridization;  // 0 sp, 1 sp2, 2 sp3
};

// Chemistry of a heavy atom in a canonical residue; nullopt when the atom
// does not belong to that residue.
std::optional<ResidueAtomChem> residue_atom_chem(std::string_view residue,
                                                 std::string_view atom);

using AtomNamePair = std::pair<std::string_view, std::string_view>;
// Intra-residue heavy-atom bonds (backbone included, peptide links not).
std::vector<AtomNamePair> residue_bonds(std::string_view residue);

}  // namespace ligpose

#endif  // LIGPOSE_CHEMIO_H_
