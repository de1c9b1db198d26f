//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_TENSOR_H_
#define LIGPOSE_TENSOR_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ligpose {

using Shape = std::vector<int64_t>;

// 64-byte aligned storage: vectorised reductions then never depend on
// where the heap placed a buffer, which keeps results bit-reproducible.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

int64_t shape_size(const Shape &shape);
std::string shape_str(const Shape &shape);

class ShapeError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class Tape;

/// Dense row-major f64 array. Copies share the underlying buffer; a tensor
/// that has been recorded on a tape is treated as immutable.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, Buffer data);
  Tensor(Shape shape, const std::vector<double> &data);
  Tensor(Shape shape, std::initializer_list<double> data);

  static Tensor scalar(double value) { return Tensor({}, { value }); }
  static Tensor from_rows(const std::vector<std::vector<double>> &rows);

  const Shape &shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int axis) const;
  int64_t size() const { return data_ ? static_cast<int64_t>(data_->size()) : 0; }
  bool empty() const { return size() == 0; }

  std::span<const double> data() const;
  // Copy-on-write access. Throws if the tensor is recorded on a tape.
  std::span<double> mutable_data();

  double item() const;
  double operator[](int64_t i) const { return (*data_)[i]; }
  double at(int64_t i, int64_t j) const { return (*data_)[i * shape_.back() + j]; }

  Tape *tape() const { return tape_; }
  int node() const { return node_; }
  bool requires_grad() const { return tape_ != nullptr; }

  // Same values, no tape linkage.
  Tensor detach() const;

private:
  friend class Tape;

  Shape shape_;
  std::shared_ptr<Buffer> data_;
  Tape *tape_ = nullptr;
  int node_ = -1;
};

/// Reverse-mode recording of tensor operations. Nodes are appended in
/// evaluation order, so the reverse of insertion order is a valid
/// topological order for the backward pass.
class Tape {
public:
  using BackwardFn = std::function<void(std::span<const double> out_grad)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Returns a leaf that shares the buffer of `value` and accumulates
  // gradients.
  Tensor watch(const Tensor &value);

  // Records an op result. `backward` receives dL/d(output) and is expected
  // to call accumulate() for every recorded input.
  Tensor record(Shape shape, Buffer value, BackwardFn backward);

  void accumulate(int node, std::span<const double> grad);
  Buffer &grad_buffer(int node);

  // Seeds d(out)/d(out) = 1 for a single-element tensor and runs the
  // reverse sweep. May be called once per tape.
  void backward(const Tensor &out);

  // Zero span if the node received no gradient.
  std::vector<double> grad(const Tensor &t) const;

  size_t size() const { return nodes_.size(); }

private:
  struct Node {
    int64_t size;
    Buffer grad;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Finds the tape shared by the given inputs; nullptr when none of them
// require gradients. Mixing tapes is an error.
Tape *common_tape(std::initializer_list<const Tensor *> inputs);
Tape *common_tape(std::span<const Tensor> inputs);

}  // namespace ligpose

#endif  // LIGPOSE_TENSOR_H_
