//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/tensor.h"

#include <algorithm>
#include <sstream>

namespace ligpose {

int64_t shape_size(const Shape &shape) {
  int64_t n = 1;
  for (int64_t d: shape) {
    if (d < 0)
      throw ShapeError("negative dimension in shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i)
    os << (i ? ", " : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)),
      data_(std::make_shared<Buffer>(shape_size(shape_), fill)) { }

Tensor::Tensor(Shape shape, Buffer data)
    : shape_(std::move(shape)) {
  if (shape_size(shape_) != static_cast<int64_t>(data.size()))
    throw ShapeError("data length " + std::to_string(data.size())
                     + " does not match shape " + shape_str(shape_));
  data_ = std::make_shared<Buffer>(std::move(data));
}

Tensor::Tensor(Shape shape, const std::vector<double> &data)
    : Tensor(std::move(shape), Buffer(data.begin(), data.end())) { }

Tensor::Tensor(Shape shape, std::initializer_list<double> data)
    : Tensor(std::move(shape), Buffer(data)) { }

Tensor Tensor::from_rows(const std::vector<std::vector<double>> &rows) {
  const int64_t cols = rows.empty() ? 0 : static_cast<int64_t>(rows[0].size());
  Buffer flat;
  flat.reserve(rows.size() * cols);
  for (const auto &r: rows) {
    if (static_cast<int64_t>(r.size()) != cols)
      throw ShapeError("ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Tensor({ static_cast<int64_t>(rows.size()), cols }, std::move(flat));
}

int64_t Tensor::dim(int axis) const {
  if (axis < 0)
    axis += ndim();
  if (axis < 0 || axis >= ndim())
    throw ShapeError("axis " + std::to_string(axis) + " out of range for "
                     + shape_str(shape_));
  return shape_[axis];
}

std::span<const double> Tensor::data() const {
  if (!data_)
    return {};
  return { data_->data(), data_->size() };
}

std::span<double> Tensor::mutable_data() {
  if (tape_ != nullptr)
    throw std::logic_error("cannot mutate a tensor recorded on a tape");
  if (!data_)
    return {};
  if (data_.use_count() > 1)
    data_ = std::make_shared<Buffer>(*data_);
  return { data_->data(), data_->size() };
}

double Tensor::item() const {
  if (size() != 1)
    throw ShapeError("item() on tensor of shape " + shape_str(shape_));
  return (*data_)[0];
}

Tensor Tensor::detach() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_;
  return t;
}

Tensor Tape::watch(const Tensor &value) {
  Tensor t = value.detach();
  t.tape_ = this;
  t.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back({ value.size(), {}, nullptr });
  return t;
}

Tensor Tape::record(Shape shape, Buffer value,
                    BackwardFn backward) {
  Tensor t(std::move(shape), std::move(value));
  t.tape_ = this;
  t.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back({ t.size(), {}, std::move(backward) });
  return t;
}

Buffer &Tape::grad_buffer(int node) {
  Node &n = nodes_[node];
  if (n.grad.empty())
    n.grad.assign(n.size, 0.0);
  return n.grad;
}

void Tape::accumulate(int node, std::span<const double> grad) {
  Buffer &g = grad_buffer(node);
  for (size_t i = 0; i < g.size(); ++i)
    g[i] += grad[i];
}

void Tape::backward(const Tensor &out) {
  if (out.tape() != this)
    throw std::logic_error("backward() on a tensor from another tape");
  if (out.size() != 1)
    throw ShapeError("backward() needs a single-element output, got "
                     + shape_str(out.shape()));
  if (consumed_)
    throw std::logic_error("tape already consumed by backward()");
  consumed_ = true;

  grad_buffer(out.node())[0] += 1.0;
  for (int i = out.node(); i >= 0; --i) {
    Node &n = nodes_[i];
    if (n.grad.empty() || !n.backward)
      continue;
    n.backward(n.grad);
    // Interior gradients are not needed once propagated.
    n.backward = nullptr;
  }
}

std::vector<double> Tape::grad(const Tensor &t) const {
  if (t.tape() != this)
    return std::vector<double>(t.size(), 0.0);
  const Node &n = nodes_[t.node()];
  if (n.grad.empty())
    return std::vector<double>(n.size, 0.0);
  return std::vector<double>(n.grad.begin(), n.grad.end());
}

Tape *common_tape(std::initializer_list<const Tensor *> inputs) {
  Tape *tape = nullptr;
  for (const Tensor *t: inputs) {
    if (t->tape() == nullptr)
      continue;
    if (tape != nullptr && tape != t->tape())
      throw std::logic_error("inputs recorded on different tapes");
    tape = t->tape();
  }
  return tape;
}

Tape *common_tape(std::span<const Tensor> inputs) {
  Tape *tape = nullptr;
  for (const Tensor &t: inputs) {
    if (t.tape() == nullptr)
      continue;
    if (tape != nullptr && tape != t.tape())
      throw std::logic_error("inputs recorded on different tapes");
    tape = t.tape();
  }
  return tape;
}

}  // namespace ligpose
