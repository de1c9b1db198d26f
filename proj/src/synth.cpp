//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/synth.h"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ligpose/rng.h"

namespace ligpose {
namespace {

Vector3d random_unit(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  while (true) {
    Vector3d v(n(rng), n(rng), n(rng));
    const double len = v.norm();
    if (len > 1e-6)
      return v / len;
  }
}

double min_distance(const Vector3d &p, const std::vector<Vector3d> &pts,
                    int skip = -1) {
  double best = 1e300;
  for (size_t k = 0; k < pts.size(); ++k)
    if (static_cast<int>(k) != skip)
      best = std::min(best, (pts[k] - p).norm());
  return best;
}

int max_valence(const std::string &e) {
  if (e == "C")
    return 4;
  if (e == "N")
    return 3;
  if (e == "O" || e == "S")
    return 2;
  return 1;
}

// Single-bond covalent radii (angstrom).
double covalent_radius(const std::string &e) {
  static const std::map<std::string, double> kRadius {
    { "C", 0.76 }, { "N", 0.71 }, { "O", 0.66 },
    { "F", 0.57 }, { "Cl", 1.02 }, { "S", 1.05 },
  };
  return kRadius.at(e);
}

// Places a new atom bonded to `parent` at `length`, away from the others.
bool place_atom(const std::vector<Vector3d> &pos, int parent, double length,
                double clearance, std::mt19937_64 &rng, Vector3d &out,
                const std::vector<Vector3d> &avoid = {},
                double avoid_clearance = 0) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Vector3d p = pos[parent] + length * random_unit(rng);
    if (min_distance(p, pos, parent) < clearance)
      continue;
    if (!avoid.empty() && min_distance(p, avoid) < avoid_clearance)
      continue;
    out = p;
    return true;
  }
  return false;
}

LigandMol grow_ligand(int target, std::mt19937_64 &rng) {
  std::vector<LigandAtom> atoms;
  std::vector<LigandBond> bonds;
  std::vector<Vector3d> pos;
  std::vector<int> valence;
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  auto add_atom = [&](const std::string &e, const Vector3d &p, bool aromatic) {
    LigandAtom a;
    a.element = e;
    a.pos = p;
    a.aromatic = aromatic;
    atoms.push_back(a);
    pos.push_back(p);
    valence.push_back(0);
    return static_cast<int>(atoms.size()) - 1;
  };

  // Start from a ring most of the time.
  const double pick = u01(rng);
  if (pick < 0.75 && target >= 6) {
    const int ring = pick < 0.5 ? 6 : 5;
    const bool aromatic = ring == 6;
    const double bond = aromatic ? 1.39 : 1.50;
    const double radius = bond / (2 * std::sin(std::numbers::pi / ring));
    const Vector3d axis = random_unit(rng);
    Vector3d e1 = axis.unitOrthogonal();
    const Vector3d e2 = axis.cross(e1);
    const int hetero = u01(rng) < 0.4 ? 0 : -1;
    for (int k = 0; k < ring; ++k) {
      const double t = 2 * std::numbers::pi * k / ring;
      add_atom(k == hetero ? "N" : "C",
               radius * (std::cos(t) * e1 + std::sin(t) * e2), aromatic);
    }
    for (int k = 0; k < ring; ++k) {
      bonds.push_back({ k, (k + 1) % ring,
                        aromatic ? BondOrder::kAromatic : BondOrder::kSingle });
      valence[k] += aromatic ? 1 : 1;
      valence[(k + 1) % ring] += 1;
    }
    // Aromatic atoms carry one extra valence from the pi system.
    if (aromatic)
      for (int k = 0; k < ring; ++k)
        ++valence[k];
  } else {
    add_atom("C", Vector3d::Zero(), false);
  }

  static const std::vector<std::pair<std::string, double>> kElements {
    { "C", 0.45 }, { "N", 0.15 }, { "O", 0.20 }, { "F", 0.05 },
    { "Cl", 0.10 }, { "S", 0.05 }
  };
  std::vector<double> weights;
  for (const auto &[_, w]: kElements)
    weights.push_back(w);
  std::discrete_distribution<int> element_pick(weights.begin(), weights.end());

  int guard = 0;
  while (static_cast<int>(atoms.size()) < target && guard++ < 1000) {
    std::uniform_int_distribution<int> up(0, static_cast<int>(atoms.size()) - 1);
    const int parent = up(rng);
    const std::string &pe = atoms[parent].element;
    if (valence[parent] >= max_valence(pe) || valence[parent] >= 3)
      continue;
    const std::string e = kElements[element_pick(rng)].first;
    // Carbonyl and nitrile groups hang off aliphatic carbon.
    const bool aliphatic_c = pe == "C" && !atoms[parent].aromatic;
    int order = 1;
    if (e == "O" && aliphatic_c && valence[parent] <= 2 && u01(rng) < 0.75)
      order = 2;
    else if (e == "N" && aliphatic_c && valence[parent] <= 1 && u01(rng) < 0.5)
      order = 3;
    if (valence[parent] + order > max_valence(pe))
      continue;
    Vector3d p;
    const double length = order == 2   ? 1.23
                          : order == 3 ? 1.16
                                       : covalent_radius(pe) + covalent_radius(e);
    if (!place_atom(pos, parent, length, 2.3, rng, p))
      continue;
    const int child = add_atom(e, p, false);
    bonds.push_back({ parent, child, static_cast<BondOrder>(order) });
    valence[parent] += order;
    valence[child] += order;
  }

  // Hydrogen counts from the remaining valence.
  for (size_t k = 0; k < atoms.size(); ++k)
    atoms[k].implicit_h = std::max(0, max_valence(atoms[k].element) - valence[k]);
  return LigandMol(std::move(atoms), std::move(bonds));
}

struct ResidueSpec {
  const char *name;
  int atoms;
};

const std::vector<ResidueSpec> kResidues {
  { "GLY", 4 }, { "ALA", 5 }, { "SER", 6 }, { "CYS", 6 },
  { "VAL", 7 }, { "THR", 7 }, { "ASP", 8 }, { "LEU", 8 },
};

std::string element_of(std::string_view atom) { return std::string(1, atom[0]); }

}  // namespace

SynthComplex synth_complex(const std::string &id, uint64_t seed,
                           const SynthOptions &opts) {
  if (opts.min_ligand_atoms < 1 || opts.max_ligand_atoms < opts.min_ligand_atoms
      || opts.num_residues < 1)
    throw std::invalid_argument("synth: bad size options");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_pick(opts.min_ligand_atoms,
                                               opts.max_ligand_atoms);
  SynthComplex out;
  out.id = id;

  // Ligand centred near a seed-dependent origin.
  LigandMol lig = grow_ligand(size_pick(rng), rng);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  const Vector3d origin(shift(rng), shift(rng), shift(rng));
  std::vector<Vector3d> lig_pos;
  Vector3d centroid = Vector3d::Zero();
  for (const LigandAtom &a: lig.atoms())
    centroid += a.pos;
  centroid /= lig.num_atoms();
  for (const LigandAtom &a: lig.atoms())
    lig_pos.push_back(a.pos - centroid + origin);
  lig.set_positions(lig_pos);
  out.ligand = lig;

  // Residues around the ligand, spread over the sphere.
  ProteinChain chain;
  chain.chain = 'A';
  std::vector<Vector3d> placed;
  std::uniform_real_distribution<double> shell(opts.shell_min, opts.shell_max);
  std::uniform_int_distribution<size_t> res_pick(0, kResidues.size() - 1);
  int total_atoms = 0;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const Vector3d jitter_axis = random_unit(rng);
  for (int r = 0; r < opts.num_residues; ++r) {
    ResidueSpec spec = kResidues[res_pick(rng)];
    if (total_atoms + spec.atoms > opts.max_pocket_atoms)
      spec = kResidues[0];
    if (total_atoms + spec.atoms > opts.max_pocket_atoms)
      break;

    const double y = 1.0 - 2.0 * (r + 0.5) / opts.num_residues;
    const double rad = std::sqrt(std::max(0.0, 1.0 - y * y));
    Vector3d dir(std::cos(golden * r) * rad, y, std::sin(golden * r) * rad);
    dir = (dir + 0.25 * jitter_axis.cross(dir)).normalized();

    // Push the C-alpha outwards until it clears the ligand by the shell
    // distance.
    const double want = shell(rng);
    Vector3d ca = origin + dir * 2.0;
    for (int k = 0; k < 200 && min_distance(ca, lig_pos) < want; ++k)
      ca += dir * 0.1;

    Residue res;
    res.name = spec.name;
    res.chain = 'A';
    res.seq = 10 + 3 * r;
    std::vector<Vector3d> local { ca };
    std::vector<std::string> names { "CA" };
    res.atoms.push_back({ "CA", "C", ca });

    std::vector<Vector3d> avoid = lig_pos;
    avoid.insert(avoid.end(), placed.begin(), placed.end());
    bool ok = true;
    // Breadth-first over the template so every atom has a placed parent.
    std::vector<AtomNamePair> todo = residue_bonds(res.name);
    std::erase_if(todo, [](const AtomNamePair &b) {
      return b.first == "OXT" || b.second == "OXT";
    });
    while (ok && !todo.empty()) {
      bool progress = false;
      for (auto it = todo.begin(); it != todo.end();) {
        auto have = [&](std::string_view n) {
          return std::find(names.begin(), names.end(), n) != names.end();
        };
        const bool ha = have(it->first), hb = have(it->second);
        if (ha && hb) {
          it = todo.erase(it);
          continue;
        }
        if (!ha && !hb) {
          ++it;
          continue;
        }
        const std::string_view parent_name = ha ? it->first : it->second;
        const std::string child(ha ? it->second : it->first);
        const int parent = static_cast<int>(
            std::find(names.begin(), names.end(), parent_name) - names.begin());
        Vector3d p;
        std::vector<Vector3d> all = local;
        if (!place_atom(all, parent, child == "O" ? 1.23 : 1.5, 2.3, rng, p,
                        avoid, 3.2)) {
          ok = false;
          break;
        }
        local.push_back(p);
        names.push_back(child);
        res.atoms.push_back({ child, element_of(child), p });
        it = todo.erase(it);
        progress = true;
      }
      if (!progress)
        break;
    }
    if (!ok || static_cast<int>(res.atoms.size()) != spec.atoms)
      continue;
    // Keep canonical atom order (N, CA, C, O, side chain) for readability.
    std::stable_sort(res.atoms.begin(), res.atoms.end(),
                     [](const ProteinAtom &a, const ProteinAtom &b) {
                       return atom_name_index(a.name) < atom_name_index(b.name);
                     });
    placed.insert(placed.end(), local.begin(), local.end());
    total_atoms += static_cast<int>(res.atoms.size());
    chain.residues.push_back(std::move(res));
  }
  if (chain.residues.empty())
    throw std::runtime_error("synth: could not place any residue");
  out.protein = std::move(chain);

  // A smooth, learnable label: size and polarity terms plus small noise.
  int polar = 0;
  for (const LigandAtom &a: out.ligand.atoms())
    polar += (a.element == "N" || a.element == "O") ? 1 : 0;
  std::normal_distribution<double> noise(0.0, 0.2);
  out.affinity = 3.0 + 0.35 * out.ligand.num_atoms() + 0.4 * polar + noise(rng);
  return out;
}

std::vector<SynthComplex> synth_dataset(int count, uint64_t seed,
                                        const SynthOptions &opts,
                                        const std::string &prefix) {
  std::vector<SynthComplex> out;
  for (int k = 0; k < count; ++k) {
    char id[32];
    std::snprintf(id, sizeof(id), "%s%02d", prefix.c_str(), k);
    out.push_back(synth_complex(id, mix_seed(seed, k), opts));
  }
  return out;
}

LigandMol random_molecule(int max_atoms, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_pick(std::min(2, max_atoms),
                                               max_atoms);
  const int n = size_pick(rng);
  static const std::vector<std::string> kElems { "C", "C", "C", "N", "O" };
  std::uniform_int_distribution<size_t> ep(0, kElems.size() - 1);
  std::vector<LigandAtom> atoms(n);
  for (auto &a: atoms)
    a.element = kElems[ep(rng)];

  // Random spanning tree plus a few ring-closing bonds; symmetric shapes
  // are common at this size, which is what the checks need.
  std::vector<LigandBond> bonds;
  std::map<std::pair<int, int>, bool> seen;
  std::uniform_int_distribution<int> order_pick(1, 4);
  auto order_of = [&]() {
    const int o = order_pick(rng);
    return o == 4 ? BondOrder::kSingle : static_cast<BondOrder>(o == 3 ? 1 : o);
  };
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pp(0, k - 1);
    const int p = pp(rng);
    bonds.push_back({ p, k, order_of() });
    seen[{ p, k }] = true;
  }
  std::uniform_int_distribution<int> extra(0, 2), any(0, n - 1);
  for (int e = extra(rng); e > 0 && n >= 3; --e) {
    int a = any(rng), b = any(rng);
    if (a == b)
      continue;
    if (a > b)
      std::swap(a, b);
    if (seen.count({ a, b }))
      continue;
    seen[{ a, b }] = true;
    bonds.push_back({ a, b, BondOrder::kSingle });
  }
  for (size_t k = 0; k < atoms.size(); ++k)
    atoms[k].pos = Vector3d(static_cast<double>(k), 0, 0);
  return LigandMol(std::move(atoms), std::move(bonds));
}

}  // namespace ligpose
