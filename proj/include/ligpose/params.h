//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_PARAMS_H_
#define LIGPOSE_PARAMS_H_

#include <cstdint>
#include <map>
#include <string>

#include "ligpose/tensor.h"

namespace ligpose {

struct NetConfig {
  int d_f = 160;
  int d_e = 80;
  int n_heads = 4;
  int n_layers = 6;
  int n_cycles = 3;
  int n_ens = 10;
  int d_r = 16;
  double leaky_slope = 0.01;
  int max_nodes = 200;
  // RBF centers are spread over [0, rbf_max] (scaled units).
  double rbf_max = 2.0;
  // Standard deviation of the ligand initialization, angstrom.
  double init_sigma = 10.0;

  int d_h() const { return d_f / n_heads; }
  void validate() const;
};

/// Named parameter tensors, ordered by name.
class ParamSet {
public:
  void set(const std::string &name, Tensor value);
  const Tensor &operator[](const std::string &name) const;
  bool contains(const std::string &name) const {
    return tensors_.count(name) != 0;
  }

  const std::map<std::string, Tensor> &tensors() const { return tensors_; }
  std::map<std::string, Tensor> &tensors() { return tensors_; }
  int64_t num_scalars() const;

  // Same values, each registered as a leaf on `tape`.
  ParamSet watched(Tape &tape) const;
  ParamSet detached() const;

private:
  std::map<std::string, Tensor> tensors_;
};

// x W^T + b with the weight/bias pair `<name>.w`, `<name>.b`.
Tensor lin(const ParamSet &p, const std::string &name, const Tensor &x);
// Layer norm over the last axis with `<name>.gamma`, `<name>.beta`.
Tensor affine_norm(const ParamSet &p, const std::string &name,
                   const Tensor &x);

}  // namespace ligpose

#endif  // LIGPOSE_PARAMS_H_
