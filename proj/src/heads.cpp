//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/heads.h"

#include "ligpose/net.h"
#include "ligpose/ops.h"

namespace ligpose {

using namespace ad;

Tensor pool(const ParamSet &p, const Tensor &f, const Tensor &e) {
  const Tensor mf = reshape(mean(f, 0), { 1, f.dim(1) });
  const Tensor me = reshape(mean(e, 0), { 1, e.dim(1) });
  return affine_norm(p, "pool", concat({ mf, me }, 1));
}

Tensor affinity_head(const ParamSet &p, const NetConfig &cfg, const Tensor &r) {
  return relu(lin(p, "aff2", leaky_relu(lin(p, "aff1", r), cfg.leaky_slope)));
}

Tensor screening_logit(const ParamSet &p, const NetConfig &cfg,
                       const Tensor &r) {
  return lin(p, "bind2", leaky_relu(lin(p, "bind1", r), cfg.leaky_slope));
}

HeadOutput apply_heads(const ParamSet &p, const NetConfig &cfg,
                       const BlockState &state) {
  HeadOutput out;
  out.r = pool(p, state.f, state.e);
  out.affinity = affinity_head(p, cfg, out.r);
  out.bind_logit = screening_logit(p, cfg, out.r);
  out.probability = sigmoid(out.bind_logit);
  return out;
}

double screening_score(double probability, double affinity) {
  return probability * affinity;
}

}  // namespace ligpose
