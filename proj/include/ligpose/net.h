//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_NET_H_
#define LIGPOSE_NET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ligpose/graph.h"
#include "ligpose/heads.h"
#include "ligpose/params.h"
#include "ligpose/symmetry.h"
#include "ligpose/tensor.h"

namespace ligpose {

ParamSet init_params(const NetConfig &cfg, uint64_t seed);

// ---- block pieces ---------------------------------------------------------

enum class GateMode {
  kLearned,
  kClosed,  // gate fixed at 0
  kOpen,    // gate fixed at 1
};

struct BlockOptions {
  GateMode gate = GateMode::kLearned;
};

std::vector<double> rbf_centers(const NetConfig &cfg);
double rbf_width(const NetConfig &cfg);

// Pair-row index vectors for an N-node sub-graph: row r = i * N + j.
struct PairIndex {
  int64_t n = 0;
  std::vector<int64_t> i;
  std::vector<int64_t> j;
  std::vector<double> off_diagonal;  // [N*N, 1] mask

  explicit PairIndex(int64_t n);
};

struct Geometry {
  Tensor diff;  // [N*N, 3], x_i - x_j
  Tensor dist;  // [N*N]
};
Geometry pair_geometry(const Tensor &x, const PairIndex &pairs);

// Concat(RBF(|x_i - x_j|), e_ij) -> [N*N, d_r + d_e].
Tensor encode_distance(const Geometry &geo, const Tensor &e,
                       const NetConfig &cfg);

struct Attention {
  Tensor a;      // [N*N, d_f], heads stacked along columns
  Tensor omega;  // [N, N, H], softmax over the second axis
};
Attention attention(const ParamSet &p, const std::string &block,
                    const NetConfig &cfg, const Tensor &f, const Tensor &d,
                    const PairIndex &pairs);

// Element-wise gate followed by the affine layer norm:
// Norm(sigmoid(W [new, prev, new - prev]) * new + prev).
Tensor gate(const ParamSet &p, const std::string &name, const Tensor &fresh,
            const Tensor &prev, GateMode mode = GateMode::kLearned);

struct FeatureUpdate {
  Tensor f;  // [N, d_f]
  Tensor e;  // [N*N, d_e]
};
FeatureUpdate aggregate_update(const ParamSet &p, const std::string &block,
                               const NetConfig &cfg, const Tensor &f,
                               const Tensor &e, const Tensor &d,
                               const Attention &att, const PairIndex &pairs,
                               const BlockOptions &opts = {});

// x + mask * sum_h lambda_h sum_{j != i} unit(x_i - x_j) (W_x a_ij^h + b).
Tensor coord_update(const ParamSet &p, const std::string &block,
                    const NetConfig &cfg, const Tensor &x, const Geometry &geo,
                    const Tensor &a, const PairIndex &pairs,
                    std::span<const double> update_mask);

std::string block_name(int layer);

// ---- cycles ---------------------------------------------------------------

struct BlockState {
  Tensor f;  // [N, d_f]
  Tensor e;  // [N*N, d_e]
  Tensor x;  // [N, 3]
};

struct BlockTrace {
  std::vector<BlockState> blocks;  // one per layer

  const BlockState &last() const { return blocks.back(); }
};

// State handed from one cycle to the next.
struct Carry {
  Tensor f_core;                     // [C, d_f]
  Tensor e_core;                     // [C*C, d_e]
  std::vector<int64_t> core_parent;  // parent index of each core row
};

Tensor input_features(const ParamSet &p, const ComplexGraph &g);
Tensor input_edges(const ParamSet &p, const ComplexGraph &g);

// One cycle of N_l blocks on a sub-graph. `x0` holds the starting
// coordinates of the sub-graph nodes; `update_mask[i]` is 1 for nodes whose
// coordinates move.
BlockTrace forward_cycle(const ParamSet &p, const NetConfig &cfg,
                         const SubGraph &sub, const Tensor &x0,
                         std::span<const double> update_mask,
                         const Carry *carry = nullptr,
                         const BlockOptions &opts = {});

Carry make_carry(const BlockTrace &trace, const SubGraph &sub);

// ---- full passes ----------------------------------------------------------

struct PassOptions {
  uint64_t seed = 0;
  int n_cycles = -1;  // cfg.n_cycles when negative
  // Starting coordinates of every graph node (scaled); random ligand
  // initialization when absent.
  std::optional<std::vector<double>> init_coords;
  // Nodes forced into every sub-graph core, and extra nodes whose
  // coordinates are updated (both parent indexes).
  std::vector<int> extra_core;
  std::vector<int> extra_updatable;
  // The cycle (1-based) that runs with `grad_params`; earlier cycles use
  // the plain parameters and later cycles are skipped. 0 = none.
  int grad_cycle = 0;
  const ParamSet *grad_params = nullptr;
  BlockOptions block;
};

struct CycleRecord {
  SubGraph sub;
  BlockTrace trace;
};

struct PassResult {
  std::vector<CycleRecord> cycles;
  std::vector<double> coords;  // all graph nodes after the last cycle, scaled
  HeadOutput heads;            // on the last cycle's final block

  int ligand_updates() const;
};

PassResult run_pass(const ParamSet &p, const NetConfig &cfg,
                    const ComplexGraph &graph, const PassOptions &opts);

// Ligand rows of a sub-graph coordinate tensor, unscaled to angstrom.
std::vector<double> ligand_coords_angstrom(const ComplexGraph &graph,
                                           std::span<const double> coords);

struct PredictionRecord {
  std::vector<double> coords;  // [L*3], angstrom
  // RMSD (angstrom) of each block's ligand coordinates to the reference
  // conformation, over all cycles of the selected member.
  std::vector<double> rmsd_trace;
  double affinity = 0;  // unscaled
  double probability = 0;
  double screening_score = 0;
  int member = 0;
  std::vector<std::vector<double>> members;  // every ensemble pose, angstrom
};

// Medoid of poses under the symmetry-corrected RMSD.
int medoid(const std::vector<std::vector<double>> &poses,
           const EquivalentIndexSet &eqset);

PredictionRecord predict(const ParamSet &p, const NetConfig &cfg,
                         const ComplexGraph &graph,
                         const EquivalentIndexSet &eqset, uint64_t seed,
                         int n_ens = -1);

}  // namespace ligpose

#endif  // LIGPOSE_NET_H_
