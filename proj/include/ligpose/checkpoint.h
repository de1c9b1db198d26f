//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_CHECKPOINT_H_
#define LIGPOSE_CHECKPOINT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ligpose/net.h"
#include "ligpose/trainer.h"

namespace ligpose {

enum class CheckpointDtype : uint32_t {
  kF32 = 0,
  kF64 = 1,
};

struct Checkpoint {
  NetConfig net;
  ParamSet params;
  std::optional<AdamState> adam;
  int64_t step = 0;
  int epoch = 0;
};

// Little-endian container: magic "LPCKPT\0\0", u32 version, u32 dtype,
// network sizes, step/epoch counters, then named tensors (and, when
// present, Adam moments in the same order).
std::string serialize_checkpoint(const Checkpoint &ckpt,
                                 CheckpointDtype dtype = CheckpointDtype::kF32);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string &path, const Checkpoint &ckpt,
                     CheckpointDtype dtype = CheckpointDtype::kF32);
Checkpoint load_checkpoint(const std::string &path);

// Whole-file helpers shared by the tools; throw InputError on failure.
std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view bytes);

}  // namespace ligpose

#endif  // LIGPOSE_CHECKPOINT_H_
