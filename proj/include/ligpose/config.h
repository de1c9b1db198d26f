//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_CONFIG_H_
#define LIGPOSE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ligpose/net.h"
#include "ligpose/trainer.h"

namespace ligpose {

struct RunConfig {
  NetConfig net;
  TrainConfig train;
  std::optional<uint64_t> seed;
  // "pose" (labelled structures), "self" (masking/denoising only) or
  // "screen" (binder classification over manifest pairs).
  std::string task = "pose";
  double pocket_cutoff = 15.0;
};

// Flat `key = value` lines; '#' starts a comment. Unknown keys and
// malformed values throw InputError.
void apply_config(std::string_view text, RunConfig &cfg);
std::vector<std::string> config_keys();
std::string config_to_json(const RunConfig &cfg);

// The first of: command-line seed, config-file seed, LIGPOSE_SEED, 0.
uint64_t resolve_seed(std::optional<uint64_t> flag, const RunConfig &cfg);

}  // namespace ligpose

#endif  // LIGPOSE_CONFIG_H_
