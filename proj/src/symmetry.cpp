//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/symmetry.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace ligpose {
namespace {

// Equitable partition by iterated neighbour-color refinement. Every
// automorphism preserves the resulting colors.
std::vector<int> refined_colors(const LigandMol &mol,
                                const std::vector<std::vector<int>> &order) {
  const int n = mol.num_atoms();
  using Key = std::tuple<std::string, int, bool, int>;
  std::map<Key, int> initial;
  std::vector<int> color(n);
  for (int i = 0; i < n; ++i) {
    const LigandAtom &a = mol.atom(i);
    const Key key { a.element, a.formal_charge, a.aromatic, mol.ring_sizes(i) };
    color[i] = initial.emplace(key, static_cast<int>(initial.size()))
                   .first->second;
  }

  int classes = static_cast<int>(initial.size());
  while (true) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sig;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> nb;
      for (int j = 0; j < n; ++j)
        if (order[i][j] != 0)
          nb.emplace_back(color[j], order[i][j]);
      std::sort(nb.begin(), nb.end());
      next[i] = sig.emplace(std::pair { color[i], std::move(nb) },
                            static_cast<int>(sig.size()))
                    .first->second;
    }
    const int refined = static_cast<int>(sig.size());
    color = std::move(next);
    if (refined == classes)
      return color;
    classes = refined;
  }
}

class Search {
public:
  Search(const LigandMol &mol, int cap): n_(mol.num_atoms()), cap_(cap) {
    order_.assign(n_, std::vector<int>(n_, 0));
    for (const LigandBond &b: mol.bonds()) {
      order_[b.i][b.j] = static_cast<int>(b.order);
      order_[b.j][b.i] = static_cast<int>(b.order);
    }
    color_ = refined_colors(mol, order_);
    image_.assign(n_, -1);
    used_.assign(n_, false);
  }

  EquivalentIndexSet run() {
    extend(0);
    return std::move(out_);
  }

private:
  // Candidates are tried in increasing order, so results come out in
  // lexicographic order of the image vector.
  bool extend(int i) {
    if (i == n_) {
      if (out_.size() >= cap_) {
        out_.truncated = true;
        return false;
      }
      out_.perms.push_back(image_);
      return true;
    }
    for (int c = 0; c < n_; ++c) {
      if (used_[c] || color_[c] != color_[i] || !consistent(i, c))
        continue;
      image_[i] = c;
      used_[c] = true;
      const bool go_on = extend(i + 1);
      used_[c] = false;
      image_[i] = -1;
      if (!go_on)
        return false;
    }
    return true;
  }

  bool consistent(int i, int c) const {
    for (int k = 0; k < i; ++k)
      if (order_[i][k] != order_[c][image_[k]])
        return false;
    return true;
  }

  int n_;
  int cap_;
  std::vector<std::vector<int>> order_;
  std::vector<int> color_;
  std::vector<int> image_;
  std::vector<bool> used_;
  EquivalentIndexSet out_;
};

}  // namespace

EquivalentIndexSet enumerate_equivalent_indexes(const LigandMol &mol,
                                                int cap) {
  if (cap < 1)
    throw std::invalid_argument("automorphism cap must be >= 1");
  if (mol.num_atoms() == 0)
    return { { {} }, false };
  return Search(mol, cap).run();
}

std::string automorphisms_to_json(const EquivalentIndexSet &set) {
  nlohmann::json j;
  j["count"] = set.size();
  j["truncated"] = set.truncated;
  j["perms"] = set.perms;
  return j.dump();
}

}  // namespace ligpose
