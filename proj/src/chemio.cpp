//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/chemio.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace ligpose {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty()
         && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Fixed-width field [begin, begin + len), clipped to the line.
std::string_view field(std::string_view line, size_t begin, size_t len) {
  if (begin >= line.size())
    return {};
  return line.substr(begin, std::min(len, line.size() - begin));
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty())
    return std::nullopt;
  if (s.front() == '+')
    s.remove_prefix(1);
  T value {};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return value;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size())
        lines.push_back(text.substr(pos));
      break;
    }
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::string normalize_element(std::string_view sym) {
  std::string e(trim(sym));
  if (e.empty())
    return e;
  e[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(e[0])));
  for (size_t i = 1; i < e.size(); ++i)
    e[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(e[i])));
  return e;
}

bool is_hydrogen(std::string_view element) {
  return element == "H" || element == "D" || element == "T";
}

int charge_from_code(int code) {
  switch (code) {
  case 1:
    return 3;
  case 2:
    return 2;
  case 3:
    return 1;
  case 5:
    return -1;
  case 6:
    return -2;
  case 7:
    return -3;
  default:
    return 0;
  }
}

int code_from_charge(int charge) {
  switch (charge) {
  case 3:
    return 1;
  case 2:
    return 2;
  case 1:
    return 3;
  case -1:
    return 5;
  case -2:
    return 6;
  case -3:
    return 7;
  default:
    return 0;
  }
}

}  // namespace

// ---- LigandMol -------------------------------------------------------------

LigandMol::LigandMol(std::vector<LigandAtom> atoms,
                     std::vector<LigandBond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  std::set<std::pair<int, int>> seen;
  for (const LigandBond &b: bonds_) {
    if (b.i < 0 || b.j < 0 || b.i >= num_atoms() || b.j >= num_atoms())
      throw ParseError("bond endpoint out of range");
    if (b.i == b.j)
      throw ParseError("self-bond on atom " + std::to_string(b.i + 1));
    if (!seen.insert(std::minmax(b.i, b.j)).second)
      throw ParseError("duplicate bond " + std::to_string(b.i + 1) + "-"
                       + std::to_string(b.j + 1));
  }
  build_topology();
}

void LigandMol::set_positions(const std::vector<Vector3d> &pos) {
  if (static_cast<int>(pos.size()) != num_atoms())
    throw std::invalid_argument("position count does not match atom count");
  for (int i = 0; i < num_atoms(); ++i)
    atoms_[i].pos = pos[i];
}

int LigandMol::other_end(int bond, int atom) const {
  const LigandBond &b = bonds_[bond];
  return b.i == atom ? b.j : b.i;
}

int LigandMol::find_bond(int i, int j) const {
  for (int b: incident_[i])
    if (other_end(b, i) == j)
      return b;
  return -1;
}

bool LigandMol::connected() const {
  if (atoms_.empty())
    return true;
  std::vector<bool> seen(atoms_.size(), false);
  std::vector<int> stack { 0 };
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int b: incident_[a]) {
      int n = other_end(b, a);
      if (!seen[n]) {
        seen[n] = true;
        ++count;
        stack.push_back(n);
      }
    }
  }
  return count == num_atoms();
}

void LigandMol::build_topology() {
  incident_.assign(atoms_.size(), {});
  for (int b = 0; b < num_bonds(); ++b) {
    incident_[bonds_[b].i].push_back(b);
    incident_[bonds_[b].j].push_back(b);
  }

  ring_sizes_.assign(atoms_.size(), 0);
  bond_in_ring_.assign(bonds_.size(), false);

  // Simple cycles up to length 8, each enumerated from its smallest atom.
  std::vector<int> path;
  std::vector<int> path_bonds;
  std::vector<bool> on_path(atoms_.size(), false);
  auto dfs = [&](auto &&self, int start, int cur) -> void {
    for (int b: incident_[cur]) {
      int n = other_end(b, cur);
      if (n == start && path.size() >= 3
          && (path_bonds.empty() || b != path_bonds.back())) {
        const int k = static_cast<int>(path.size());
        for (int a: path)
          ring_sizes_[a] |= static_cast<uint8_t>(1u << (k - 3));
        for (int pb: path_bonds)
          bond_in_ring_[pb] = true;
        bond_in_ring_[b] = true;
        continue;
      }
      if (n <= start || on_path[n] || path.size() >= 8)
        continue;
      on_path[n] = true;
      path.push_back(n);
      path_bonds.push_back(b);
      self(self, start, n);
      path.pop_back();
      path_bonds.pop_back();
      on_path[n] = false;
    }
  };
  for (int s = 0; s < num_atoms(); ++s) {
    path.assign(1, s);
    path_bonds.clear();
    on_path[s] = true;
    dfs(dfs, s, s);
    on_path[s] = false;
  }
}

// ---- SDF ---------------------------------------------------------------------

LigandMol parse_sdf(std::string_view text) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.size() < 4)
    throw ParseError("malformed counts line: missing header block");
  const std::string_view counts = lines[3];
  if (counts.find("V3000") != std::string_view::npos)
    throw ParseError("V3000 molfiles are not supported");
  auto natoms = parse_number<int>(field(counts, 0, 3));
  auto nbonds = parse_number<int>(field(counts, 3, 3));
  if (!natoms || !nbonds || *natoms < 0 || *nbonds < 0)
    throw ParseError("malformed counts line: '" + std::string(counts) + "'");

  const size_t atom_begin = 4, bond_begin = atom_begin + *natoms,
               bond_end = bond_begin + *nbonds;
  if (lines.size() < bond_end)
    throw ParseError("atom/bond count mismatch: counts line declares "
                     + std::to_string(*natoms) + " atoms and "
                     + std::to_string(*nbonds) + " bonds");

  std::vector<LigandAtom> raw_atoms(*natoms);
  for (int i = 0; i < *natoms; ++i) {
    std::string_view line = lines[atom_begin + i];
    auto x = parse_number<double>(field(line, 0, 10));
    auto y = parse_number<double>(field(line, 10, 10));
    auto z = parse_number<double>(field(line, 20, 10));
    std::string sym = normalize_element(field(line, 31, 3));
    if (!x || !y || !z || sym.empty())
      throw ParseError("malformed atom line " + std::to_string(i + 1) + ": '"
                       + std::string(line) + "'");
    LigandAtom &a = raw_atoms[i];
    a.element = sym;
    a.pos = Vector3d(*x, *y, *z);
    a.formal_charge = charge_from_code(
        parse_number<int>(field(line, 36, 3)).value_or(0));
  }

  struct RawBond {
    int i, j;
    BondOrder order;
  };
  std::vector<RawBond> raw_bonds;
  for (int k = 0; k < *nbonds; ++k) {
    std::string_view line = lines[bond_begin + k];
    auto a = parse_number<int>(field(line, 0, 3));
    auto b = parse_number<int>(field(line, 3, 3));
    auto t = parse_number<int>(field(line, 6, 3));
    if (!a || !b || !t)
      throw ParseError("malformed bond line " + std::to_string(k + 1) + ": '"
                       + std::string(line) + "'");
    if (*a < 1 || *b < 1 || *a > *natoms || *b > *natoms)
      throw ParseError("bond endpoint out of range in bond line "
                       + std::to_string(k + 1));
    if (*t < 1 || *t > 4)
      throw ParseError("unsupported bond type code " + std::to_string(*t));
    raw_bonds.push_back({ *a - 1, *b - 1, static_cast<BondOrder>(*t) });
  }

  // Properties block. Any M  CHG line replaces all atom-block charges.
  bool saw_end = false, saw_chg = false;
  for (size_t l = bond_end; l < lines.size(); ++l) {
    std::string_view line = lines[l];
    if (line.starts_with("M  END")) {
      saw_end = true;
      break;
    }
    if (line.starts_with("$$$$"))
      break;
    if (!line.starts_with("M  CHG"))
      continue;
    if (!saw_chg) {
      for (LigandAtom &a: raw_atoms)
        a.formal_charge = 0;
      saw_chg = true;
    }
    std::istringstream is { std::string(line.substr(6)) };
    int n = 0;
    if (!(is >> n))
      throw ParseError("malformed M  CHG line");
    for (int e = 0; e < n; ++e) {
      int idx = 0, chg = 0;
      if (!(is >> idx >> chg) || idx < 1 || idx > *natoms)
        throw ParseError("malformed M  CHG entry");
      raw_atoms[idx - 1].formal_charge = chg;
    }
  }
  if (!saw_end)
    throw ParseError("missing 'M  END' terminator");

  // Fold hydrogens into their heavy neighbours.
  std::vector<int> remap(*natoms, -1);
  std::vector<LigandAtom> atoms;
  for (int i = 0; i < *natoms; ++i) {
    if (is_hydrogen(raw_atoms[i].element))
      continue;
    remap[i] = static_cast<int>(atoms.size());
    atoms.push_back(raw_atoms[i]);
  }
  if (atoms.empty())
    throw ParseError("no heavy atoms in molecule");

  std::vector<LigandBond> bonds;
  for (const RawBond &b: raw_bonds) {
    const bool hi = remap[b.i] < 0, hj = remap[b.j] < 0;
    if (hi && hj)
      continue;
    if (hi || hj) {
      atoms[hi ? remap[b.j] : remap[b.i]].implicit_h += 1;
      continue;
    }
    if (b.order == BondOrder::kAromatic) {
      atoms[remap[b.i]].aromatic = true;
      atoms[remap[b.j]].aromatic = true;
    }
    bonds.push_back({ remap[b.i], remap[b.j], b.order });
  }

  LigandMol mol(std::move(atoms), std::move(bonds));
  if (!mol.connected())
    throw ParseError("multi-fragment molecule");
  return mol;
}

std::string emit_sdf(const LigandMol &mol, std::string_view title) {
  std::string out;
  char buf[128];
  out += title;
  out += "\n  LigPose\n\n";
  std::snprintf(buf, sizeof(buf), "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                mol.num_atoms(), mol.num_bonds());
  out += buf;
  std::vector<int> charged;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const LigandAtom &a = mol.atom(i);
    std::snprintf(buf, sizeof(buf),
                  "%10.4f%10.4f%10.4f %-3s 0%3d  0  0  0  0  0  0  0  0  0  0\n",
                  a.pos.x(), a.pos.y(), a.pos.z(), a.element.c_str(),
                  code_from_charge(a.formal_charge));
    out += buf;
    if (a.formal_charge != 0)
      charged.push_back(i);
  }
  for (const LigandBond &b: mol.bonds()) {
    std::snprintf(buf, sizeof(buf), "%3d%3d%3d  0\n", b.i + 1, b.j + 1,
                  static_cast<int>(b.order));
    out += buf;
  }
  for (size_t start = 0; start < charged.size(); start += 8) {
    const size_t n = std::min<size_t>(8, charged.size() - start);
    std::snprintf(buf, sizeof(buf), "M  CHG%3zu", n);
    out += buf;
    for (size_t k = start; k < start + n; ++k) {
      std::snprintf(buf, sizeof(buf), " %3d %3d", charged[k] + 1,
                    mol.atom(charged[k]).formal_charge);
      out += buf;
    }
    out += '\n';
  }
  out += "M  END\n$$$$\n";
  return out;
}

// ---- residue vocabulary ------------------------------------------------------

namespace {

constexpr std::array<std::string_view, kNumResidueTypes> kResidueNames {
  "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
  "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
};

constexpr std::array<std::string_view, kNumAtomNames> kAtomNames {
  "N",   "CA",  "C",   "CB",  "O",   "CG",  "CG1", "CG2", "OG",  "OG1",
  "SG",  "CD",  "CD1", "CD2", "ND1", "ND2", "OD1", "OD2", "SD",  "CE",
  "CE1", "CE2", "CE3", "NE",  "NE1", "NE2", "OE1", "OE2", "CH2", "NH1",
  "NH2", "OH",  "CZ",  "CZ2", "CZ3", "NZ",  "OXT",
};

struct TemplateAtom {
  std::string_view name;
  int num_h;
  int hyb;  // 0 sp, 1 sp2, 2 sp3
};

struct ResidueTemplate {
  std::vector<TemplateAtom> atoms;  // side chain beyond CB-less backbone
  std::vector<std::pair<std::string_view, std::string_view>> bonds;
};

const std::map<std::string_view, ResidueTemplate> &residue_templates() {
  static const std::map<std::string_view, ResidueTemplate> table = [] {
    std::map<std::string_view, ResidueTemplate> t;
    t["ALA"] = { { { "CB", 3, 2 } }, { { "CA", "CB" } } };
    t["ARG"] = { { { "CB", 2, 2 },
                   { "CG", 2, 2 },
                   { "CD", 2, 2 },
                   { "NE", 1, 1 },
                   { "CZ", 0, 1 },
                   { "NH1", 2, 1 },
                   { "NH2", 2, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD" },
                   { "CD", "NE" },
                   { "NE", "CZ" },
                   { "CZ", "NH1" },
                   { "CZ", "NH2" } } };
    t["ASN"] = {
      { { "CB", 2, 2 }, { "CG", 0, 1 }, { "OD1", 0, 1 }, { "ND2", 2, 1 } },
      { { "CA", "CB" }, { "CB", "CG" }, { "CG", "OD1" }, { "CG", "ND2" } }
    };
    t["ASP"] = {
      { { "CB", 2, 2 }, { "CG", 0, 1 }, { "OD1", 0, 1 }, { "OD2", 0, 1 } },
      { { "CA", "CB" }, { "CB", "CG" }, { "CG", "OD1" }, { "CG", "OD2" } }
    };
    t["CYS"] = { { { "CB", 2, 2 }, { "SG", 1, 2 } },
                 { { "CA", "CB" }, { "CB", "SG" } } };
    t["GLN"] = { { { "CB", 2, 2 },
                   { "CG", 2, 2 },
                   { "CD", 0, 1 },
                   { "OE1", 0, 1 },
                   { "NE2", 2, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD" },
                   { "CD", "OE1" },
                   { "CD", "NE2" } } };
    t["GLU"] = { { { "CB", 2, 2 },
                   { "CG", 2, 2 },
                   { "CD", 0, 1 },
                   { "OE1", 0, 1 },
                   { "OE2", 0, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD" },
                   { "CD", "OE1" },
                   { "CD", "OE2" } } };
    t["GLY"] = { {}, {} };
    t["HIS"] = { { { "CB", 2, 2 },
                   { "CG", 0, 1 },
                   { "ND1", 1, 1 },
                   { "CD2", 1, 1 },
                   { "CE1", 1, 1 },
                   { "NE2", 0, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "ND1" },
                   { "CG", "CD2" },
                   { "ND1", "CE1" },
                   { "CE1", "NE2" },
                   { "NE2", "CD2" } } };
    t["ILE"] = {
      { { "CB", 1, 2 }, { "CG1", 2, 2 }, { "CG2", 3, 2 }, { "CD1", 3, 2 } },
      { { "CA", "CB" }, { "CB", "CG1" }, { "CB", "CG2" }, { "CG1", "CD1" } }
    };
    t["LEU"] = {
      { { "CB", 2, 2 }, { "CG", 1, 2 }, { "CD1", 3, 2 }, { "CD2", 3, 2 } },
      { { "CA", "CB" }, { "CB", "CG" }, { "CG", "CD1" }, { "CG", "CD2" } }
    };
    t["LYS"] = { { { "CB", 2, 2 },
                   { "CG", 2, 2 },
                   { "CD", 2, 2 },
                   { "CE", 2, 2 },
                   { "NZ", 3, 2 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD" },
                   { "CD", "CE" },
                   { "CE", "NZ" } } };
    t["MET"] = {
      { { "CB", 2, 2 }, { "CG", 2, 2 }, { "SD", 0, 2 }, { "CE", 3, 2 } },
      { { "CA", "CB" }, { "CB", "CG" }, { "CG", "SD" }, { "SD", "CE" } }
    };
    t["PHE"] = { { { "CB", 2, 2 },
                   { "CG", 0, 1 },
                   { "CD1", 1, 1 },
                   { "CD2", 1, 1 },
                   { "CE1", 1, 1 },
                   { "CE2", 1, 1 },
                   { "CZ", 1, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD1" },
                   { "CG", "CD2" },
                   { "CD1", "CE1" },
                   { "CD2", "CE2" },
                   { "CE1", "CZ" },
                   { "CE2", "CZ" } } };
    t["PRO"] = { { { "CB", 2, 2 }, { "CG", 2, 2 }, { "CD", 2, 2 } },
                 { { "CA", "CB" }, { "CB", "CG" }, { "CG", "CD" }, { "CD", "N" } } };
    t["SER"] = { { { "CB", 2, 2 }, { "OG", 1, 2 } },
                 { { "CA", "CB" }, { "CB", "OG" } } };
    t["THR"] = { { { "CB", 1, 2 }, { "OG1", 1, 2 }, { "CG2", 3, 2 } },
                 { { "CA", "CB" }, { "CB", "OG1" }, { "CB", "CG2" } } };
    t["TRP"] = { { { "CB", 2, 2 },
                   { "CG", 0, 1 },
                   { "CD1", 1, 1 },
                   { "CD2", 0, 1 },
                   { "NE1", 1, 1 },
                   { "CE2", 0, 1 },
                   { "CE3", 1, 1 },
                   { "CZ2", 1, 1 },
                   { "CZ3", 1, 1 },
                   { "CH2", 1, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD1" },
                   { "CG", "CD2" },
                   { "CD1", "NE1" },
                   { "NE1", "CE2" },
                   { "CE2", "CD2" },
                   { "CD2", "CE3" },
                   { "CE3", "CZ3" },
                   { "CZ3", "CH2" },
                   { "CH2", "CZ2" },
                   { "CZ2", "CE2" } } };
    t["TYR"] = { { { "CB", 2, 2 },
                   { "CG", 0, 1 },
                   { "CD1", 1, 1 },
                   { "CD2", 1, 1 },
                   { "CE1", 1, 1 },
                   { "CE2", 1, 1 },
                   { "CZ", 0, 1 },
                   { "OH", 1, 1 } },
                 { { "CA", "CB" },
                   { "CB", "CG" },
                   { "CG", "CD1" },
                   { "CG", "CD2" },
                   { "CD1", "CE1" },
                   { "CD2", "CE2" },
                   { "CE1", "CZ" },
                   { "CE2", "CZ" },
                   { "CZ", "OH" } } };
    t["VAL"] = {
      { { "CB", 1, 2 }, { "CG1", 3, 2 }, { "CG2", 3, 2 } },
      { { "CA", "CB" }, { "CB", "CG1" }, { "CB", "CG2" } }
    };
    return t;
  }();
  return table;
}

}  // namespace

int residue_type_index(std::string_view name) {
  auto it = std::find(kResidueNames.begin(), kResidueNames.end(), name);
  return it == kResidueNames.end()
             ? -1
             : static_cast<int>(it - kResidueNames.begin());
}

std::string_view residue_type_name(int index) {
  return kResidueNames.at(index);
}

int atom_name_index(std::string_view name) {
  auto it = std::find(kAtomNames.begin(), kAtomNames.end(), name);
  return it == kAtomNames.end() ? -1
                                : static_cast<int>(it - kAtomNames.begin());
}

std::string_view atom_name(int index) {
  return kAtomNames.at(index);
}

int atom_name_class(std::string_view residue, int idx) {
  static const std::map<std::pair<std::string_view, std::string_view>,
                        std::string_view>
      collapse {
        { { "VAL", "CG2" }, "CG1" }, { { "LEU", "CD2" }, "CD1" },
        { { "PHE", "CD2" }, "CD1" }, { { "PHE", "CE2" }, "CE1" },
        { { "TYR", "CD2" }, "CD1" }, { { "TYR", "CE2" }, "CE1" },
        { { "ASP", "OD2" }, "OD1" }, { { "GLU", "OE2" }, "OE1" },
        { { "ARG", "NH2" }, "NH1" },
      };
  if (idx < 0)
    return idx;
  auto it = collapse.find({ residue, kAtomNames[idx] });
  return it == collapse.end() ? idx : atom_name_index(it->second);
}

std::optional<ResidueAtomChem> residue_atom_chem(std::string_view residue,
                                                 std::string_view atom) {
  const auto &table = residue_templates();
  auto it = table.find(residue);
  if (it == table.end())
    return std::nullopt;
  if (atom == "N")
    return ResidueAtomChem { residue == "PRO" ? 0 : 1, 1 };
  if (atom == "CA")
    return ResidueAtomChem { residue == "GLY" ? 2 : 1, 2 };
  if (atom == "C" || atom == "O" || atom == "OXT")
    return ResidueAtomChem { 0, 1 };
  for (const TemplateAtom &ta: it->second.atoms)
    if (ta.name == atom)
      return ResidueAtomChem { ta.num_h, ta.hyb };
  return std::nullopt;
}

std::vector<AtomNamePair> residue_bonds(std::string_view residue) {
  const auto &table = residue_templates();
  auto it = table.find(residue);
  if (it == table.end())
    return {};
  std::vector<AtomNamePair> bonds {
    { "N", "CA" }, { "CA", "C" }, { "C", "O" }, { "C", "OXT" }
  };
  bonds.insert(bonds.end(), it->second.bonds.begin(), it->second.bonds.end());
  return bonds;
}

// ---- PDB ---------------------------------------------------------------------

const ProteinAtom *Residue::find(std::string_view atom_name) const {
  for (const ProteinAtom &a: atoms)
    if (a.name == atom_name)
      return &a;
  return nullptr;
}

const ProteinAtom &Residue::calpha() const {
  const ProteinAtom *ca = find("CA");
  if (ca == nullptr)
    throw InputError("residue " + name + " " + std::to_string(seq)
                     + " has no CA atom");
  return *ca;
}

namespace {

std::string infer_element(std::string_view name_field) {
  // Columns 13-14 hold the element for standard names; a leading digit
  // or blank shifts it right.
  for (char c: name_field) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      return std::string(1, c);
  }
  return {};
}

bool is_water(std::string_view res) {
  return res == "HOH" || res == "WAT" || res == "DOD";
}

}  // namespace

ProteinChain parse_pdb(std::string_view text, const PdbOptions &opts) {
  ProteinChain chain;
  std::optional<char> selected = opts.chain;
  bool any_atom = false;

  for (std::string_view line: split_lines(text)) {
    if (line.starts_with("ENDMDL") || line.starts_with("END ")
        || line == "END")
      break;
    if (!line.starts_with("ATOM  "))
      continue;

    const char chain_id = line.size() > 21 ? line[21] : ' ';
    if (!selected)
      selected = chain_id;
    if (chain_id != *selected)
      continue;

    const char alt = line.size() > 16 ? line[16] : ' ';
    if (alt != ' ' && alt != 'A' && alt != '1')
      continue;

    const std::string atom(trim(field(line, 12, 4)));
    const std::string res(trim(field(line, 17, 3)));
    if (is_water(res))
      continue;

    std::string element = normalize_element(field(line, 76, 2));
    if (element.empty())
      element = normalize_element(infer_element(field(line, 12, 2)));
    if (is_hydrogen(element))
      continue;

    if (residue_type_index(res) < 0)
      throw ParseError("non-canonical residue '" + res + "'");

    auto seq = parse_number<int>(field(line, 22, 4));
    auto x = parse_number<double>(field(line, 30, 8));
    auto y = parse_number<double>(field(line, 38, 8));
    auto z = parse_number<double>(field(line, 46, 8));
    if (!seq)
      throw ParseError("unparseable residue number in '" + std::string(line)
                       + "'");
    if (!x || !y || !z)
      throw ParseError("unparseable coordinate field in '"
                       + std::string(line) + "'");
    const char icode = line.size() > 26 ? line[26] : ' ';

    any_atom = true;
    if (chain.residues.empty() || chain.residues.back().seq != *seq
        || chain.residues.back().icode != icode
        || chain.residues.back().name != res) {
      Residue r;
      r.name = res;
      r.chain = chain_id;
      r.seq = *seq;
      r.icode = icode;
      chain.residues.push_back(std::move(r));
    }
    Residue &r = chain.residues.back();
    if (r.find(atom) != nullptr)
      throw ParseError("duplicate atom name " + atom + " in residue " + res
                       + " " + std::to_string(*seq));
    r.atoms.push_back({ atom, element, Vector3d(*x, *y, *z) });
  }

  if (!any_atom)
    throw ParseError("no ATOM records / empty chain");
  chain.chain = *selected;

  for (const Residue &r: chain.residues)
    if (r.find("CA") == nullptr)
      throw ParseError("residue " + r.name + " " + std::to_string(r.seq)
                       + " missing CA");

  for (size_t k = 0; k + 1 < chain.residues.size(); ++k) {
    const ProteinAtom *c = chain.residues[k].find("C");
    const ProteinAtom *n = chain.residues[k + 1].find("N");
    if (c && n && (c->pos - n->pos).norm() <= 2.0) {
      chain.residues[k].linked_next = true;
      chain.residues[k + 1].linked_prev = true;
    }
  }
  return chain;
}

Pocket select_pocket(const ProteinChain &protein, const LigandMol &ligand,
                     double cutoff) {
  if (protein.residues.empty() || ligand.num_atoms() == 0)
    throw InputError("select_pocket needs a nonempty protein and ligand");
  Pocket pocket;
  pocket.rule = PocketRule::kLigandProximity;
  pocket.cutoff = cutoff;
  const double cut2 = cutoff * cutoff;
  for (const Residue &r: protein.residues) {
    if (is_water(r.name))
      continue;
    const Vector3d &ca = r.calpha().pos;
    bool near = false;
    for (const LigandAtom &a: ligand.atoms())
      if ((a.pos - ca).squaredNorm() <= cut2) {
        near = true;
        break;
      }
    if (near)
      pocket.residues.push_back(r);
  }
  if (pocket.residues.empty())
    throw EmptyPocketError("empty pocket: no residue C-alpha within "
                           + std::to_string(cutoff) + " A of the ligand");
  return pocket;
}

Pocket external_pocket(const ProteinChain &protein) {
  if (protein.residues.empty())
    throw EmptyPocketError("empty pocket");
  Pocket pocket;
  pocket.residues = protein.residues;
  pocket.rule = PocketRule::kExternal;
  pocket.cutoff = 0.0;
  return pocket;
}

std::string emit_pdb(const ProteinChain &chain) {
  std::string out;
  char buf[96];
  int serial = 1;
  for (const Residue &r: chain.residues)
    for (const ProteinAtom &a: r.atoms) {
      // Names shorter than four characters start in column 14.
      const std::string name = a.name.size() < 4 ? " " + a.name : a.name;
      std::snprintf(buf, sizeof(buf),
                    "ATOM  %5d %-4s %3s %c%4d%c   %8.3f%8.3f%8.3f%6.2f%6.2f"
                    "          %2s\n",
                    serial++, name.c_str(), r.name.c_str(), chain.chain,
                    r.seq, r.icode, a.pos.x(), a.pos.y(), a.pos.z(), 1.0, 0.0,
                    a.element.c_str());
      out += buf;
    }
  out += "END\n";
  return out;
}

}  // namespace ligpose
