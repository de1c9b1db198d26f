//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/params.h"

#include <stdexcept>

#include "ligpose/error.h"
#include "ligpose/ops.h"

namespace ligpose {

void NetConfig::validate() const {
  if (d_f <= 0 || d_e <= 0 || n_heads <= 0 || n_layers <= 0 || n_cycles <= 0
      || n_ens <= 0 || d_r <= 0 || max_nodes <= 0)
    throw InputError("network sizes must be positive");
  if (d_f % n_heads != 0)
    throw InputError("d_f must be divisible by n_heads");
  if (!(rbf_max > 0) || !(init_sigma >= 0) || !(leaky_slope >= 0))
    throw InputError("rbf_max must be positive, init_sigma and leaky_slope "
                     "non-negative");
}

// ---- ParamSet -------------------------------------------------------------

void ParamSet::set(const std::string &name, Tensor value) {
  tensors_[name] = std::move(value);
}

const Tensor &ParamSet::operator[](const std::string &name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end())
    throw std::out_of_range("no parameter named '" + name + "'");
  return it->second;
}

int64_t ParamSet::num_scalars() const {
  int64_t n = 0;
  for (const auto &[_, t]: tensors_)
    n += t.size();
  return n;
}

ParamSet ParamSet::watched(Tape &tape) const {
  ParamSet out;
  for (const auto &[name, t]: tensors_)
    out.tensors_[name] = tape.watch(t);
  return out;
}

ParamSet ParamSet::detached() const {
  ParamSet out;
  for (const auto &[name, t]: tensors_)
    out.tensors_[name] = t.detach();
  return out;
}

Tensor lin(const ParamSet &p, const std::string &name, const Tensor &x) {
  return ad::linear(x, p[name + ".w"], p[name + ".b"]);
}

Tensor affine_norm(const ParamSet &p, const std::string &name, const Tensor &x) {
  return ad::add(ad::mul(ad::layer_norm(x, -1), p[name + ".gamma"]),
                 p[name + ".beta"]);
}

}  // namespace ligpose
