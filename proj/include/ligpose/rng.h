//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_RNG_H_
#define LIGPOSE_RNG_H_

#include <cstdint>

namespace ligpose {

// Derives an independent stream seed from (seed, stream) with the
// splitmix64 finalizer.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ligpose

#endif  // LIGPOSE_RNG_H_
