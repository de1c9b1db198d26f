//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/graph.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include <json.hpp>

namespace ligpose {
namespace {

constexpr std::array<std::string_view, kNumLigandElements - 1>
    kLigandElements { "C", "N", "O", "S", "P", "F", "Cl", "Br", "I" };

void one_hot(double *row, int offset, int bins, int value) {
  value = std::clamp(value, 0, bins - 1);
  row[offset + value] = 1.0;
}

int argmax(const double *p, int n) {
  return static_cast<int>(std::max_element(p, p + n) - p);
}

double bond_valence(BondOrder o) {
  switch (o) {
  case BondOrder::kSingle:
    return 1.0;
  case BondOrder::kDouble:
    return 2.0;
  case BondOrder::kTriple:
    return 3.0;
  case BondOrder::kAromatic:
    return 1.5;
  }
  return 1.0;
}

// Implicit hydrogens implied by the smallest standard valence that fits
// the heavy-atom bonds.
int implied_hydrogens(const LigandMol &mol, int i) {
  const LigandAtom &a = mol.atom(i);
  double explicit_valence = 0;
  for (int b: mol.incident_bonds(i))
    explicit_valence += bond_valence(mol.bonds()[b].order);
  const int used = static_cast<int>(std::floor(explicit_valence + 1e-9));

  std::vector<int> allowed;
  const std::string &e = a.element;
  if (e == "C")
    allowed = { 4 };
  else if (e == "N")
    allowed = { 3, 5 };
  else if (e == "O")
    allowed = { 2 };
  else if (e == "S")
    allowed = { 2, 4, 6 };
  else if (e == "P")
    allowed = { 3, 5 };
  else if (e == "F" || e == "Cl" || e == "Br" || e == "I")
    allowed = { 1 };
  else if (e == "B")
    allowed = { 3 };
  else
    return 0;

  // Cations of N/O/S/P gain a valence; anions lose one; carbon ions lose
  // one either way.
  int shift = 0;
  if (e == "C")
    shift = -std::abs(a.formal_charge);
  else if (e == "B")
    shift = a.formal_charge < 0 ? 1 : -a.formal_charge;
  else
    shift = a.formal_charge;

  for (int v: allowed) {
    if (v + shift >= used)
      return v + shift - used;
  }
  return 0;
}

int ligand_hybridization(const LigandMol &mol, int i) {
  const LigandAtom &a = mol.atom(i);
  const int heavy = mol.degree(i);
  const int steric = heavy + a.implicit_h;
  if (heavy == 0 && a.implicit_h == 0)
    return 5;
  if (a.aromatic)
    return 1;
  int n_double = 0, n_triple = 0;
  for (int b: mol.incident_bonds(i)) {
    if (mol.bonds()[b].order == BondOrder::kDouble)
      ++n_double;
    else if (mol.bonds()[b].order == BondOrder::kTriple)
      ++n_triple;
  }
  if (steric == 5)
    return 3;
  if (steric >= 6)
    return 4;
  if (n_triple > 0 || n_double >= 2)
    return 0;
  if (n_double == 1)
    return 1;
  return 2;
}

int charge_bin(int charge) {
  if (charge < -2 || charge > 2)
    return 5;
  return charge + 2;
}

void featurize_ligand_atom(const LigandMol &mol, int i, double *row) {
  const LigandAtom &a = mol.atom(i);
  using namespace ligand_feat;
  one_hot(row, kElement, 10, ligand_element_index(a.element));
  one_hot(row, kDegree, 6, mol.degree(i));
  one_hot(row, kImplicitValence, 5, implied_hydrogens(mol, i));
  one_hot(row, kNumH, 5, a.implicit_h);
  one_hot(row, kHybridization, 6, ligand_hybridization(mol, i));
  one_hot(row, kCharge, 6, charge_bin(a.formal_charge));
  for (int k = 0; k < 6; ++k)
    if (mol.ring_sizes(i) & (1u << k))
      row[kRingSize + k] = 1.0;
  row[kAromatic] = a.aromatic ? 1.0 : 0.0;
}

int protein_element_index(std::string_view e) {
  if (e == "C")
    return 0;
  if (e == "N")
    return 1;
  if (e == "O")
    return 2;
  if (e == "S")
    return 3;
  return -1;
}

bool aromatic_residue_atom(std::string_view res, std::string_view atom) {
  static const std::array<std::string_view, 10> ring {
    "CG", "CD1", "CD2", "CE1", "CE2", "CE3", "CZ", "CZ2", "CZ3", "CH2"
  };
  if (res == "HIS")
    return atom == "CG" || atom == "ND1" || atom == "CD2" || atom == "CE1"
           || atom == "NE2";
  if (res == "TRP" && atom == "NE1")
    return true;
  if (res == "PHE" || res == "TYR" || res == "TRP")
    return std::find(ring.begin(), ring.end(), atom) != ring.end();
  return false;
}

int residue_bond_type(std::string_view res, std::string_view a,
                      std::string_view b) {
  auto is = [&](std::string_view x, std::string_view y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  if (aromatic_residue_atom(res, a) && aromatic_residue_atom(res, b))
    return 4;
  if (is("C", "O") || is("CG", "OD1") || is("CD", "OE1") || is("CZ", "NH1"))
    return 2;
  return 1;
}

void set_bond(ComplexGraph &g, int i, int j, int bond_type) {
  for (auto [a, b]: { std::pair { i, j }, std::pair { j, i } }) {
    double *e = g.edge(a, b);
    e[edge_feat::kCovalent] = 1.0;
    std::fill_n(e + edge_feat::kBondType, edge_feat::kNumBondTypes, 0.0);
    e[edge_feat::kBondType + bond_type] = 1.0;
  }
}

}  // namespace

int ligand_element_index(std::string_view element) {
  auto it = std::find(kLigandElements.begin(), kLigandElements.end(), element);
  if (it == kLigandElements.end())
    return kNumLigandElements - 1;
  return static_cast<int>(it - kLigandElements.begin());
}

int ComplexGraph::ligand_element_class(int i) const {
  return argmax(node_row(i) + ligand_feat::kElement, kNumLigandElements);
}

int ComplexGraph::protein_atom_class(int i) const {
  const int name = argmax(node_row(i) + protein_feat::kAtomName, kNumAtomNames);
  return atom_name_class(residue_type_name(protein_residue_class(i)), name);
}

int ComplexGraph::protein_residue_class(int i) const {
  return argmax(node_row(i) + protein_feat::kResidue, kNumResidueTypes);
}

int ComplexGraph::bond_type_class(int i, int j) const {
  return argmax(edge(i, j) + edge_feat::kBondType, edge_feat::kNumBondTypes);
}

void ComplexGraph::refresh_distance_channel(std::span<const int> nodes) {
  auto update = [this](int i, int j) {
    double d = -1.0;
    if (rigid_part[i] == rigid_part[j]) {
      double s = 0;
      for (int k = 0; k < 3; ++k) {
        const double t = coords[i * 3 + k] - coords[j * 3 + k];
        s += t * t;
      }
      d = std::sqrt(s);
    }
    edge(i, j)[edge_feat::kDistance] = d;
    edge(j, i)[edge_feat::kDistance] = d;
  };
  if (nodes.empty()) {
    for (int i = 0; i < num_nodes; ++i)
      for (int j = i; j < num_nodes; ++j)
        update(i, j);
    return;
  }
  for (int i: nodes)
    for (int j = 0; j < num_nodes; ++j)
      update(i, j);
}

bool is_rotatable(const LigandMol &mol, int bond) {
  const LigandBond &b = mol.bonds()[bond];
  return b.order == BondOrder::kSingle && !mol.bond_in_ring(bond)
         && mol.degree(b.i) >= 2 && mol.degree(b.j) >= 2;
}

std::vector<int> ligand_rigid_parts(const LigandMol &mol) {
  const int n = mol.num_atoms();
  std::vector<int> part(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (part[s] >= 0)
      continue;
    std::vector<int> stack { s };
    part[s] = next;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b: mol.incident_bonds(a)) {
        if (is_rotatable(mol, b))
          continue;
        const int o = mol.other_end(b, a);
        if (part[o] < 0) {
          part[o] = next;
          stack.push_back(o);
        }
      }
    }
    ++next;
  }
  return part;
}

ComplexGraph featurize(const Pocket &pocket, const LigandMol &ligand) {
  if (pocket.residues.empty())
    throw EmptyPocketError("featurize: empty pocket");
  if (ligand.num_atoms() == 0)
    throw InputError("featurize: ligand has no atoms");
  for (const LigandAtom &a: ligand.atoms())
    if (ligand_element_index(a.element) == kNumLigandElements - 1
        && a.element != "B" && a.element != "Se" && a.element != "Si")
      throw InputError("ligand element '" + a.element
                       + "' outside the ligand vocabulary");

  ComplexGraph g;
  g.num_ligand = ligand.num_atoms();

  struct ProtRef {
    int residue;
    const ProteinAtom *atom;
  };
  std::vector<ProtRef> prot;
  for (size_t r = 0; r < pocket.residues.size(); ++r)
    for (const ProteinAtom &a: pocket.residues[r].atoms)
      prot.push_back({ static_cast<int>(r), &a });

  g.num_nodes = g.num_ligand + static_cast<int>(prot.size());
  const int n = g.num_nodes;
  g.roles.assign(n, NodeRole::kLigand);
  g.rigid_part.assign(n, 0);
  g.atom_name.assign(n, -1);
  g.residue_type.assign(n, -1);
  g.residue_index.assign(n, -1);
  g.node_feats.assign(static_cast<size_t>(n) * kNodeFeatDim, 0.0);
  g.edge_feats.assign(static_cast<size_t>(n) * n * kEdgeFeatDim, 0.0);
  g.coords.assign(static_cast<size_t>(n) * 3, 0.0);
  g.ligand_ref.assign(static_cast<size_t>(g.num_ligand) * 3, 0.0);

  // Ligand rows.
  const std::vector<int> lig_parts = ligand_rigid_parts(ligand);
  const int num_lig_parts =
      lig_parts.empty()
          ? 0
          : *std::max_element(lig_parts.begin(), lig_parts.end()) + 1;
  for (int i = 0; i < g.num_ligand; ++i) {
    featurize_ligand_atom(ligand, i, g.node_row(i));
    g.rigid_part[i] = lig_parts[i];
    for (int k = 0; k < 3; ++k) {
      g.coords[i * 3 + k] = ligand.atom(i).pos[k] * kCoordScale;
      g.ligand_ref[i * 3 + k] = g.coords[i * 3 + k];
    }
  }
  for (const LigandBond &b: ligand.bonds())
    set_bond(g, b.i, b.j, static_cast<int>(b.order));

  // Protein rows.
  std::vector<int> first_row(pocket.residues.size(), -1);
  for (size_t p = 0; p < prot.size(); ++p) {
    const int i = g.num_ligand + static_cast<int>(p);
    const Residue &res = pocket.residues[prot[p].residue];
    const ProteinAtom &atom = *prot[p].atom;
    if (first_row[prot[p].residue] < 0)
      first_row[prot[p].residue] = i;

    const int res_idx = residue_type_index(res.name);
    const int name_idx = atom_name_index(atom.name);
    const int elem_idx = protein_element_index(atom.element);
    auto chem = residue_atom_chem(res.name, atom.name);
    if (res_idx < 0)
      throw InputError("non-canonical residue '" + res.name + "'");
    if (name_idx < 0 || !chem)
      throw InputError("atom name '" + atom.name + "' not valid for residue "
                       + res.name);
    if (elem_idx < 0)
      throw InputError("protein element '" + atom.element
                       + "' outside {C, N, O, S}");

    int degree = 0;
    for (const auto &[a, b]: residue_bonds(res.name)) {
      std::string_view other;
      if (a == atom.name)
        other = b;
      else if (b == atom.name)
        other = a;
      else
        continue;
      if (res.find(other) != nullptr)
        ++degree;
    }
    int num_h = chem->num_h;
    if (atom.name == "N") {
      if (res.linked_prev)
        ++degree;
      else
        ++num_h;
    }
    if (atom.name == "C" && res.linked_next)
      ++degree;

    double *row = g.node_row(i);
    using namespace protein_feat;
    one_hot(row, kElement, 4, elem_idx);
    one_hot(row, kDegree, 5, degree);
    one_hot(row, kImplicitValence, 5, num_h);
    one_hot(row, kNumH, 5, num_h);
    one_hot(row, kHybridization, 3, chem->hybridization);
    one_hot(row, kResidue, kNumResidueTypes, res_idx);
    one_hot(row, kAtomName, kNumAtomNames, name_idx);

    g.roles[i] = (atom.name == "CA" || atom.name == "CB")
                     ? NodeRole::kProteinCore
                     : NodeRole::kProteinContext;
    g.rigid_part[i] = num_lig_parts + prot[p].residue;
    g.atom_name[i] = name_idx;
    g.residue_type[i] = res_idx;
    g.residue_index[i] = prot[p].residue;
    for (int k = 0; k < 3; ++k)
      g.coords[i * 3 + k] = atom.pos[k] * kCoordScale;
  }

  // Intra-residue bonds.
  for (size_t r = 0; r < pocket.residues.size(); ++r) {
    const Residue &res = pocket.residues[r];
    auto row_of = [&](std::string_view name) {
      for (size_t k = 0; k < res.atoms.size(); ++k)
        if (res.atoms[k].name == name)
          return first_row[r] + static_cast<int>(k);
      return -1;
    };
    for (const auto &[a, b]: residue_bonds(res.name)) {
      const int ia = row_of(a), ib = row_of(b);
      if (ia >= 0 && ib >= 0)
        set_bond(g, ia, ib, residue_bond_type(res.name, a, b));
    }
  }
  // Peptide links between consecutive pocket residues. They stay in
  // separate rigid parts.
  for (size_t r = 0; r + 1 < pocket.residues.size(); ++r) {
    const Residue &a = pocket.residues[r], &b = pocket.residues[r + 1];
    const ProteinAtom *c = a.find("C"), *nn = b.find("N");
    if (c == nullptr || nn == nullptr || (c->pos - nn->pos).norm() > 2.0)
      continue;
    int ic = -1, in = -1;
    for (size_t k = 0; k < a.atoms.size(); ++k)
      if (&a.atoms[k] == c)
        ic = first_row[r] + static_cast<int>(k);
    for (size_t k = 0; k < b.atoms.size(); ++k)
      if (&b.atoms[k] == nn)
        in = first_row[r + 1] + static_cast<int>(k);
    set_bond(g, ic, in, 1);
  }

  // Non-bonded pairs and self edges carry bond type "none".
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double *e = g.edge(i, j);
      if (e[edge_feat::kCovalent] == 0.0)
        e[edge_feat::kBondType] = 1.0;
    }
  g.refresh_distance_channel();
  return g;
}

std::array<double, 3> pocket_centroid(const ComplexGraph &graph) {
  std::array<double, 3> c { 0, 0, 0 };
  int count = 0;
  for (int i = graph.num_ligand; i < graph.num_nodes; ++i) {
    if (graph.atom_name[i] != 1)
      continue;
    for (int k = 0; k < 3; ++k)
      c[k] += graph.coords[i * 3 + k];
    ++count;
  }
  if (count == 0)
    throw InputError("pocket has no C-alpha nodes");
  for (double &x: c)
    x /= count;
  return c;
}

ComplexGraph init_ligand_coords(const ComplexGraph &graph, uint64_t seed,
                                double sigma_angstrom) {
  ComplexGraph out = graph;
  const auto center = pocket_centroid(graph);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = sigma_angstrom * kCoordScale;
  for (int i = 0; i < graph.num_ligand; ++i)
    for (int k = 0; k < 3; ++k)
      out.coords[i * 3 + k] = center[k] + sigma * normal(rng);
  return out;
}

std::vector<int64_t> core_nodes(const ComplexGraph &graph,
                                std::span<const int> extra_core) {
  std::vector<bool> core(graph.num_nodes, false);
  for (int i = 0; i < graph.num_nodes; ++i)
    core[i] = graph.is_core(i);
  for (int i: extra_core)
    core.at(i) = true;
  std::vector<int64_t> out;
  for (int i = 0; i < graph.num_nodes; ++i)
    if (core[i])
      out.push_back(i);
  return out;
}

ComplexGraph restrict_graph(const ComplexGraph &graph,
                            std::span<const int64_t> nodes) {
  ComplexGraph g;
  const int n = static_cast<int>(nodes.size());
  g.num_nodes = n;
  g.num_ligand = 0;
  for (int64_t p: nodes)
    if (p < graph.num_ligand)
      ++g.num_ligand;
  for (int k = 0; k < g.num_ligand; ++k)
    if (nodes[k] >= graph.num_ligand)
      throw std::invalid_argument("restrict_graph: ligand nodes must come first");

  g.roles.resize(n);
  g.rigid_part.resize(n);
  g.atom_name.resize(n);
  g.residue_type.resize(n);
  g.residue_index.resize(n);
  g.node_feats.resize(static_cast<size_t>(n) * kNodeFeatDim);
  g.edge_feats.resize(static_cast<size_t>(n) * n * kEdgeFeatDim);
  g.coords.resize(static_cast<size_t>(n) * 3);
  g.ligand_ref.resize(static_cast<size_t>(g.num_ligand) * 3);
  for (int a = 0; a < n; ++a) {
    const int64_t p = nodes[a];
    g.roles[a] = graph.roles[p];
    g.rigid_part[a] = graph.rigid_part[p];
    g.atom_name[a] = graph.atom_name[p];
    g.residue_type[a] = graph.residue_type[p];
    g.residue_index[a] = graph.residue_index[p];
    std::copy_n(graph.node_row(p), kNodeFeatDim, g.node_row(a));
    std::copy_n(graph.coords.data() + p * 3, 3, g.coords.data() + a * 3);
    if (a < g.num_ligand)
      std::copy_n(graph.ligand_ref.data() + p * 3, 3,
                  g.ligand_ref.data() + a * 3);
    for (int b = 0; b < n; ++b)
      std::copy_n(graph.edge(p, nodes[b]), kEdgeFeatDim, g.edge(a, b));
  }
  return g;
}

SubGraph sample_subgraph(const ComplexGraph &graph, int max_nodes,
                         uint64_t seed, std::span<const int> extra_core) {
  std::vector<int64_t> core = core_nodes(graph, extra_core);
  if (static_cast<int>(core.size()) > max_nodes)
    throw std::invalid_argument(
        "sample_subgraph: " + std::to_string(core.size())
        + " core atoms exceed max_nodes " + std::to_string(max_nodes));

  std::vector<bool> is_core(graph.num_nodes, false);
  for (int64_t c: core)
    is_core[c] = true;
  std::vector<int64_t> context;
  for (int i = 0; i < graph.num_nodes; ++i)
    if (!is_core[i])
      context.push_back(i);

  const size_t room = static_cast<size_t>(max_nodes) - core.size();
  std::vector<int64_t> chosen;
  if (context.size() <= room) {
    chosen = context;
  } else {
    std::mt19937_64 rng(seed);
    std::sample(context.begin(), context.end(), std::back_inserter(chosen),
                room, rng);
  }

  SubGraph sub;
  sub.num_core = static_cast<int>(core.size());
  sub.parent = core;
  sub.parent.insert(sub.parent.end(), chosen.begin(), chosen.end());
  sub.graph = restrict_graph(graph, sub.parent);
  return sub;
}

// ---- serialization ---------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little,
              "graph container assumes a little-endian host");

constexpr char kGraphMagic[8] = { 'L', 'P', 'G', 'R', 'A', 'P', 'H', '\0' };
constexpr uint32_t kGraphVersion = 1;

template <class T>
void put(std::string &out, const T &v) {
  out.append(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
void put_vec(std::string &out, const std::vector<T> &v) {
  out.append(reinterpret_cast<const char *>(v.data()), v.size() * sizeof(T));
}

class Reader {
public:
  explicit Reader(std::string_view bytes): bytes_(bytes) { }

  template <class T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  template <class T>
  void get_vec(std::vector<T> &v, size_t n) {
    need(n * sizeof(T));
    v.resize(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
  }

  bool done() const { return pos_ == bytes_.size(); }

private:
  void need(size_t n) const {
    if (pos_ + n > bytes_.size())
      throw ParseError("graph container truncated");
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string serialize_graph(const ComplexGraph &g) {
  std::string out;
  out.append(kGraphMagic, sizeof(kGraphMagic));
  put(out, kGraphVersion);
  put(out, static_cast<uint32_t>(g.num_nodes));
  put(out, static_cast<uint32_t>(g.num_ligand));
  put(out, static_cast<uint32_t>(kNodeFeatDim));
  put(out, static_cast<uint32_t>(kEdgeFeatDim));
  for (NodeRole r: g.roles)
    put(out, static_cast<uint8_t>(r));
  for (const auto *v: { &g.rigid_part, &g.atom_name, &g.residue_type,
                        &g.residue_index })
    for (int x: *v)
      put(out, static_cast<int32_t>(x));
  put_vec(out, g.node_feats);
  put_vec(out, g.edge_feats);
  put_vec(out, g.coords);
  put_vec(out, g.ligand_ref);
  return out;
}

ComplexGraph deserialize_graph(std::string_view bytes) {
  Reader in(bytes);
  char magic[8];
  for (char &c: magic)
    c = in.get<char>();
  if (std::memcmp(magic, kGraphMagic, sizeof(magic)) != 0)
    throw ParseError("not a LigPose graph container");
  const auto version = in.get<uint32_t>();
  if (version != kGraphVersion)
    throw ParseError("unsupported graph container version "
                     + std::to_string(version));
  ComplexGraph g;
  g.num_nodes = static_cast<int>(in.get<uint32_t>());
  g.num_ligand = static_cast<int>(in.get<uint32_t>());
  if (in.get<uint32_t>() != kNodeFeatDim || in.get<uint32_t>() != kEdgeFeatDim)
    throw ParseError("graph container feature sizes do not match");
  if (g.num_ligand > g.num_nodes)
    throw ParseError("graph container: ligand count exceeds node count");
  const size_t n = g.num_nodes;
  g.roles.resize(n);
  for (NodeRole &r: g.roles) {
    const auto v = in.get<uint8_t>();
    if (v > 2)
      throw ParseError("graph container: bad node role");
    r = static_cast<NodeRole>(v);
  }
  for (auto *v: { &g.rigid_part, &g.atom_name, &g.residue_type,
                  &g.residue_index }) {
    v->resize(n);
    for (int &x: *v)
      x = in.get<int32_t>();
  }
  in.get_vec(g.node_feats, n * kNodeFeatDim);
  in.get_vec(g.edge_feats, n * n * kEdgeFeatDim);
  in.get_vec(g.coords, n * 3);
  in.get_vec(g.ligand_ref, static_cast<size_t>(g.num_ligand) * 3);
  if (!in.done())
    throw ParseError("graph container has trailing bytes");
  return g;
}

std::string graph_to_json(const ComplexGraph &g) {
  nlohmann::json j;
  j["num_nodes"] = g.num_nodes;
  j["num_ligand"] = g.num_ligand;
  j["node_feat_dim"] = kNodeFeatDim;
  j["edge_feat_dim"] = kEdgeFeatDim;
  auto &nodes = j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < g.num_nodes; ++i) {
    const int dim = i < g.num_ligand ? kLigandFeatDim : kProteinFeatDim;
    nodes.push_back({
        { "role", static_cast<int>(g.roles[i]) },
        { "rigid_part", g.rigid_part[i] },
        { "coords",
          { g.coords[i * 3], g.coords[i * 3 + 1], g.coords[i * 3 + 2] } },
        { "features", std::vector<double>(g.node_row(i), g.node_row(i) + dim) },
    });
  }
  auto &edges = j["bonds"] = nlohmann::json::array();
  for (int i = 0; i < g.num_nodes; ++i)
    for (int k = i + 1; k < g.num_nodes; ++k)
      if (g.edge(i, k)[edge_feat::kCovalent] != 0.0)
        edges.push_back({ i, k, g.bond_type_class(i, k),
                          g.edge(i, k)[edge_feat::kDistance] });
  return j.dump(1);
}

}  // namespace ligpose
