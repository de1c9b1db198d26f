//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_OPS_H_
#define LIGPOSE_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ligpose/tensor.h"

// Differentiable primitives. Every function records onto the tape of its
// inputs (if any input requires gradients) and is otherwise a plain
// forward computation.
namespace ligpose::ad {

// x [R, in], w [out, in], b [out] or empty -> x w^T + b, shape [R, out].
Tensor linear(const Tensor &x, const Tensor &w, const Tensor &b = {});
// a [m, k], b [k, n] -> [m, n].
Tensor matmul(const Tensor &a, const Tensor &b);

// Elementwise with right-aligned broadcasting (numpy rules).
Tensor add(const Tensor &a, const Tensor &b);
Tensor sub(const Tensor &a, const Tensor &b);
Tensor mul(const Tensor &a, const Tensor &b);

Tensor scale(const Tensor &a, double factor);
Tensor add_scalar(const Tensor &a, double value);

Tensor concat(std::span<const Tensor> parts, int axis = -1);
Tensor concat(std::initializer_list<Tensor> parts, int axis = -1);
Tensor slice(const Tensor &a, int axis, int64_t begin, int64_t end);
Tensor reshape(const Tensor &a, Shape shape);
// Rows of `a` viewed as [R, rest...]; out[k] = a[index[k]].
Tensor gather_rows(const Tensor &a, std::span<const int64_t> index);
// a [R, C], index [R] -> out[r] = a[r, index[r]], shape [R].
Tensor pick(const Tensor &a, std::span<const int64_t> index);

Tensor leaky_relu(const Tensor &a, double slope);
Tensor relu(const Tensor &a);
Tensor sigmoid(const Tensor &a);
Tensor exp(const Tensor &a);
Tensor log(const Tensor &a);
// a^p for a > 0 (or integer-free p where a >= 0 is well defined).
Tensor pow(const Tensor &a, double p);

Tensor softmax(const Tensor &a, int axis);
Tensor log_softmax(const Tensor &a, int axis);
// Zero mean, unit variance along `axis`; no affine part.
Tensor layer_norm(const Tensor &a, int axis, double eps = 1e-5);

Tensor sum(const Tensor &a);
Tensor sum(const Tensor &a, int axis);
Tensor mean(const Tensor &a);
Tensor mean(const Tensor &a, int axis);

// sqrt(sum_axis a^2 + eps). With eps == 0 the gradient at the origin is
// taken as zero.
Tensor l2_norm(const Tensor &a, int axis, double eps = 1e-8);

// Gaussian radial basis expansion: out[..., k] = exp(-(d - mu_k)^2 / (2 s^2)).
Tensor rbf_encode(const Tensor &d, std::span<const double> centers,
                  double width);

}  // namespace ligpose::ad

#endif  // LIGPOSE_OPS_H_
