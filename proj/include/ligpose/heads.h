//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_HEADS_H_
#define LIGPOSE_HEADS_H_

#include "ligpose/params.h"

namespace ligpose {

struct BlockState;

struct HeadOutput {
  Tensor r;             // [1, d_f + d_e]
  Tensor affinity;      // [1, 1], scaled domain, >= 0
  Tensor bind_logit;    // [1, 1]
  Tensor probability;   // [1, 1]
};

Tensor pool(const ParamSet &p, const Tensor &f, const Tensor &e);
Tensor affinity_head(const ParamSet &p, const NetConfig &cfg, const Tensor &r);
Tensor screening_logit(const ParamSet &p, const NetConfig &cfg,
                       const Tensor &r);
HeadOutput apply_heads(const ParamSet &p, const NetConfig &cfg,
                       const BlockState &state);

// Product of binding probability and (unscaled) affinity.
double screening_score(double probability, double affinity);

}  // namespace ligpose

#endif  // LIGPOSE_HEADS_H_
