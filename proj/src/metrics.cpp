//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace ligpose {
namespace {

void check_pose_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() % 3 != 0)
    throw std::invalid_argument("pose sizes differ or are not multiples of 3");
}

}  // namespace

double plain_rmsd(std::span<const double> pred,
                  std::span<const double> native) {
  check_pose_pair(pred, native);
  if (pred.empty())
    return 0.0;
  double s = 0;
  for (size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - native[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size() / 3));
}

double symmetric_rmsd(std::span<const double> pred,
                      std::span<const double> native,
                      const EquivalentIndexSet &eqset) {
  check_pose_pair(pred, native);
  const size_t n = pred.size() / 3;
  if (n == 0)
    return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto &perm: eqset.perms) {
    if (perm.size() != n)
      throw std::invalid_argument("permutation length does not match pose");
    double s = 0;
    for (size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) {
        const double d = pred[i * 3 + k] - native[perm[i] * 3 + k];
        s += d * d;
      }
    best = std::min(best, s);
  }
  return std::sqrt(best / static_cast<double>(n));
}

double success_rate(std::span<const double> rmsds, double threshold) {
  if (rmsds.empty())
    throw std::invalid_argument("success rate of an empty list");
  const auto hits = std::count_if(rmsds.begin(), rmsds.end(),
                                  [&](double r) { return r < threshold; });
  return static_cast<double>(hits) / static_cast<double>(rmsds.size());
}

std::vector<Candidate> rank_candidates(const ScreenPanel &panel) {
  std::vector<Candidate> out = panel.candidates;
  std::sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    if (a.score != b.score)
      return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

int top_count(int num_candidates, double alpha) {
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("alpha must lie in (0, 1]");
  // Guard against alpha * M landing a hair above an integer.
  const double x = alpha * num_candidates;
  const double r = std::round(x);
  return static_cast<int>(std::abs(x - r) < 1e-9 ? r : std::ceil(x));
}

double enrichment_factor(const ScreenPanel &panel, double alpha) {
  const auto ranked = rank_candidates(panel);
  const int total = static_cast<int>(
      std::count_if(ranked.begin(), ranked.end(),
                    [](const Candidate &c) { return c.true_binder; }));
  if (total == 0)
    throw std::invalid_argument("panel '" + panel.target
                                + "' has no true binders");
  const int top = top_count(static_cast<int>(ranked.size()), alpha);
  int hits = 0;
  for (int k = 0; k < top; ++k)
    hits += ranked[k].true_binder ? 1 : 0;
  return hits / (total * alpha);
}

double screening_success(std::span<const ScreenPanel> panels, double alpha) {
  if (panels.empty())
    throw std::invalid_argument("no screening panels");
  int hits = 0;
  for (const ScreenPanel &panel: panels) {
    const auto ranked = rank_candidates(panel);
    const int top = top_count(static_cast<int>(ranked.size()), alpha);
    for (int k = 0; k < top; ++k)
      if (ranked[k].best_ligand) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(panels.size());
}

double interaction_reproducibility(const std::vector<std::string> &predicted,
                                   const std::vector<std::string> &native) {
  const std::set<std::string> a(predicted.begin(), predicted.end());
  const std::set<std::string> b(native.begin(), native.end());
  int shared = 0;
  for (const auto &s: a)
    shared += b.count(s) ? 1 : 0;
  const int uni = static_cast<int>(a.size() + b.size()) - shared;
  return (1.0 + shared) / (2.0 + uni);
}

}  // namespace ligpose
