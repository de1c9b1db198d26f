//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/loss.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ligpose/ops.h"

namespace ligpose {

using namespace ad;

namespace {

std::vector<int64_t> to_rows(std::span<const int> perm, int64_t n) {
  std::vector<int64_t> rows(n);
  if (perm.empty()) {
    std::iota(rows.begin(), rows.end(), 0);
  } else {
    if (static_cast<int64_t>(perm.size()) != n)
      throw ShapeError("permutation length does not match ligand size");
    std::copy(perm.begin(), perm.end(), rows.begin());
  }
  return rows;
}

Tensor zero() { return Tensor::scalar(0.0); }

std::map<int64_t, int64_t> row_of_parent(const SubGraph &sub) {
  std::map<int64_t, int64_t> m;
  for (size_t a = 0; a < sub.parent.size(); ++a)
    m[sub.parent[a]] = static_cast<int64_t>(a);
  return m;
}

int64_t lookup(const std::map<int64_t, int64_t> &m, int64_t parent) {
  auto it = m.find(parent);
  if (it == m.end())
    throw std::invalid_argument("masked node " + std::to_string(parent)
                                + " is not in the sub-graph");
  return it->second;
}

Tensor head_mlp(const ParamSet &p, const std::string &name, const Tensor &x) {
  return lin(p, name + "2", leaky_relu(lin(p, name + "1", x), 0.01));
}

}  // namespace

Tensor coord_loss(const Tensor &pred, std::span<const double> native,
                  std::span<const int> perm) {
  const int64_t n = pred.dim(0);
  if (pred.ndim() != 2 || pred.dim(1) != 3
      || static_cast<int64_t>(native.size()) != n * 3)
    throw ShapeError("coord_loss: pred must be [L, 3] matching native");
  const Tensor nat({ n, 3 }, std::vector<double>(native.begin(), native.end()));
  const Tensor target = gather_rows(nat, to_rows(perm, n));
  return mean(l2_norm(sub(pred, target), 1, 0.0));
}

int sym_argmin(std::span<const double> pred, std::span<const double> native,
               const EquivalentIndexSet &eqset) {
  const size_t n = pred.size() / 3;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < eqset.perms.size(); ++k) {
    const auto &perm = eqset.perms[k];
    if (perm.size() != n)
      throw ShapeError("permutation length does not match ligand size");
    double s = 0;
    for (size_t i = 0; i < n; ++i) {
      double d2 = 0;
      for (int c = 0; c < 3; ++c) {
        const double d = pred[i * 3 + c] - native[perm[i] * 3 + c];
        d2 += d * d;
      }
      s += std::sqrt(d2);
    }
    if (s < best_value) {
      best_value = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

SymLoss sym_loss(const Tensor &pred, std::span<const double> native,
                 const EquivalentIndexSet &eqset) {
  if (eqset.perms.empty())
    throw std::invalid_argument("sym_loss: empty equivalent index set");
  SymLoss out;
  out.perm_index = sym_argmin(pred.data(), native, eqset);
  out.value = coord_loss(pred, native, eqset.perms[out.perm_index]);
  return out;
}

Tensor affinity_loss(const Tensor &y_pred, double y_true) {
  const Tensor d = add_scalar(reshape(y_pred, {}), -y_true);
  return mul(d, d);
}

Tensor supervised_loss(const BlockTrace &trace, int num_ligand,
                       std::span<const double> native,
                       const EquivalentIndexSet &eqset, const Tensor *y_aff,
                       std::optional<double> y_true,
                       const LossWeights &weights) {
  const int nl = static_cast<int>(trace.blocks.size());
  if (nl == 0)
    throw std::invalid_argument("supervised_loss: empty trace");
  auto block_loss = [&](int l) {
    const Tensor lig = slice(trace.blocks[l - 1].x, 0, 0, num_ligand);
    return sym_loss(lig, native, eqset).value;
  };
  Tensor coord = block_loss(nl);
  if (nl > 2) {
    std::vector<Tensor> mids;
    for (int l = 2; l <= nl - 1; ++l)
      mids.push_back(reshape(block_loss(l), { 1 }));
    coord = add(coord, reshape(mean(concat(mids, 0)), {}));
  }
  Tensor total = scale(coord, weights.gamma1);
  if (y_aff != nullptr && y_true)
    total = add(total, scale(affinity_loss(*y_aff, *y_true), weights.gamma2));
  return total;
}

Tensor focal_loss(const Tensor &logits, std::span<const int64_t> targets,
                  double gamma, double alpha) {
  if (logits.ndim() != 2 || logits.dim(0) != static_cast<int64_t>(targets.size()))
    throw ShapeError("focal_loss: logits [M, C] with M targets expected");
  if (targets.empty())
    return zero();
  const Tensor log_pt = pick(log_softmax(logits, 1), targets);
  Tensor term = log_pt;
  if (gamma != 0.0) {
    const Tensor one_minus = add_scalar(scale(exp(log_pt), -1.0), 1.0);
    term = mul(pow(relu(one_minus), gamma), log_pt);
  }
  return scale(mean(term), -alpha);
}

Tensor binary_focal_loss(const Tensor &logit, bool label, double gamma,
                         double alpha) {
  const Tensor two = concat({ Tensor({ 1, 1 }, 0.0), reshape(logit, { 1, 1 }) }, 1);
  const int64_t target = label ? 1 : 0;
  return focal_loss(two, std::span<const int64_t>(&target, 1), gamma, alpha);
}

std::vector<int> MaskPlan::nodes() const {
  std::vector<int> out(protein_nodes);
  out.insert(out.end(), ligand_nodes.begin(), ligand_nodes.end());
  for (const auto *edges: { &protein_edges, &ligand_edges })
    for (auto [i, j]: *edges) {
      out.push_back(i);
      out.push_back(j);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

McmOutput mcm_loss(const ParamSet &p, const BlockState &state,
                   const SubGraph &sub, const MaskPlan &plan) {
  const auto rows = row_of_parent(sub);
  const int64_t n = sub.graph.num_nodes;
  auto node_rows = [&](const std::vector<int> &ids) {
    std::vector<int64_t> r;
    for (int id: ids)
      r.push_back(lookup(rows, id));
    return r;
  };
  auto to64 = [](const std::vector<int> &v) {
    return std::vector<int64_t>(v.begin(), v.end());
  };

  McmOutput out;
  out.atom = out.residue = out.element = out.bond = zero();
  if (!plan.protein_nodes.empty()) {
    const Tensor h = gather_rows(state.f, node_rows(plan.protein_nodes));
    out.atom_logits = head_mlp(p, "mcm.atom", h);
    out.residue_logits = head_mlp(p, "mcm.res", h);
    out.atom = focal_loss(out.atom_logits, to64(plan.atom_targets));
    out.residue = focal_loss(out.residue_logits, to64(plan.residue_targets));
  }
  if (!plan.ligand_nodes.empty()) {
    const Tensor h = gather_rows(state.f, node_rows(plan.ligand_nodes));
    out.element_logits = head_mlp(p, "mcm.elem", h);
    out.element = focal_loss(out.element_logits, to64(plan.element_targets));
  }
  std::vector<int64_t> edge_rows;
  for (const auto *edges: { &plan.protein_edges, &plan.ligand_edges })
    for (auto [i, j]: *edges)
      edge_rows.push_back(lookup(rows, i) * n + lookup(rows, j));
  if (!edge_rows.empty()) {
    out.bond_logits = head_mlp(p, "mcm.bond", gather_rows(state.e, edge_rows));
    out.bond = focal_loss(out.bond_logits, to64(plan.bond_targets));
  }
  out.total = add(add(out.atom, out.residue), add(out.element, out.bond));
  return out;
}

Tensor dpr_loss(const Tensor &x, std::span<const int64_t> rows,
                std::span<const double> original) {
  const int64_t k = static_cast<int64_t>(rows.size());
  if (static_cast<int64_t>(original.size()) != k * 3)
    throw ShapeError("dpr_loss: original positions do not match rows");
  if (k == 0)
    return zero();
  const Tensor orig({ k, 3 },
                    std::vector<double>(original.begin(), original.end()));
  return mean(l2_norm(sub(gather_rows(x, rows), orig), 1, 0.0));
}

Tensor self_loss(const Tensor &mcm, const Tensor &dpr) { return add(mcm, dpr); }

}  // namespace ligpose
