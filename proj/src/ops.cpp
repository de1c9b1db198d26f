//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/ops.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace ligpose::ad {
namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

int normalize_axis(int axis, int ndim) {
  if (axis < 0)
    axis += ndim;
  if (axis < 0 || axis >= ndim)
    throw ShapeError("axis out of range");
  return axis;
}

struct AxisSplit {
  int64_t outer, len, inner;
};

AxisSplit split_axis(const Shape &shape, int axis) {
  AxisSplit s { 1, shape[axis], 1 };
  for (int d = 0; d < axis; ++d)
    s.outer *= shape[d];
  for (size_t d = axis + 1; d < shape.size(); ++d)
    s.inner *= shape[d];
  return s;
}

Shape drop_axis(const Shape &shape, int axis) {
  Shape out;
  for (int d = 0; d < static_cast<int>(shape.size()); ++d)
    if (d != axis)
      out.push_back(shape[d]);
  return out;
}

// Wraps a forward result: records it if a tape is present.
Tensor emit(Tape *tape, Shape shape, Buffer value,
            Tape::BackwardFn backward) {
  if (tape == nullptr)
    return Tensor(std::move(shape), std::move(value));
  return tape->record(std::move(shape), std::move(value), std::move(backward));
}

bool tracked(const Tensor &t) {
  return t.tape() != nullptr;
}

struct Broadcast {
  Shape out;
  std::vector<int64_t> stride_a, stride_b;
  bool same = false;
};

Broadcast broadcast_shapes(const Shape &a, const Shape &b) {
  Broadcast bc;
  if (a == b) {
    bc.out = a;
    bc.same = true;
    return bc;
  }
  const size_t nd = std::max(a.size(), b.size());
  bc.out.assign(nd, 1);
  bc.stride_a.assign(nd, 0);
  bc.stride_b.assign(nd, 0);
  auto dim_at = [nd](const Shape &s, size_t d) -> int64_t {
    const size_t off = nd - s.size();
    return d < off ? 1 : s[d - off];
  };
  for (size_t d = 0; d < nd; ++d) {
    const int64_t da = dim_at(a, d), db = dim_at(b, d);
    if (da != db && da != 1 && db != 1)
      throw ShapeError("cannot broadcast " + shape_str(a) + " with "
                       + shape_str(b));
    bc.out[d] = std::max(da, db);
  }
  int64_t sa = 1, sb = 1;
  for (size_t d = nd; d-- > 0;) {
    const int64_t da = dim_at(a, d), db = dim_at(b, d);
    bc.stride_a[d] = da == 1 ? 0 : sa;
    bc.stride_b[d] = db == 1 ? 0 : sb;
    sa *= da;
    sb *= db;
  }
  return bc;
}

// Collapses the broadcast into runs along the innermost (coalesced) axis:
// f(i, ia, ib, sa, sb, len) covers out[i .. i+len) with operand strides
// sa/sb (0 or 1).
template <class F>
void for_each_run(const Broadcast &bc, F &&f) {
  const int64_t total = shape_size(bc.out);
  if (bc.same) {
    f(int64_t { 0 }, int64_t { 0 }, int64_t { 0 }, int64_t { 1 }, int64_t { 1 },
      total);
    return;
  }
  // Drop unit axes and merge neighbours whose strides are contiguous.
  Shape dims;
  std::vector<int64_t> sa, sb;
  for (size_t d = 0; d < bc.out.size(); ++d) {
    if (bc.out[d] == 1)
      continue;
    if (!dims.empty() && sa.back() == bc.stride_a[d] * bc.out[d]
        && sb.back() == bc.stride_b[d] * bc.out[d]) {
      dims.back() *= bc.out[d];
      sa.back() = bc.stride_a[d];
      sb.back() = bc.stride_b[d];
      continue;
    }
    dims.push_back(bc.out[d]);
    sa.push_back(bc.stride_a[d]);
    sb.push_back(bc.stride_b[d]);
  }
  if (dims.empty()) {
    f(int64_t { 0 }, int64_t { 0 }, int64_t { 0 }, int64_t { 0 }, int64_t { 0 },
      total);
    return;
  }
  const int nd = static_cast<int>(dims.size());
  const int64_t len = dims.back();
  const int64_t ra = sa.back(), rb = sb.back();
  std::vector<int64_t> idx(nd, 0);
  int64_t ia = 0, ib = 0;
  for (int64_t i = 0; i < total; i += len) {
    f(i, ia, ib, ra, rb, len);
    for (int d = nd - 2; d >= 0; --d) {
      ++idx[d];
      ia += sa[d];
      ib += sb[d];
      if (idx[d] < dims[d])
        break;
      ia -= sa[d] * dims[d];
      ib -= sb[d] * dims[d];
      idx[d] = 0;
    }
  }
}

enum class BinaryKind { kAdd, kSub, kMul };

template <BinaryKind kKind>
void binary_forward(const Broadcast &bc, const double *av, const double *bv,
                    double *out) {
  for_each_run(bc, [&](int64_t i, int64_t ia, int64_t ib, int64_t sa,
                       int64_t sb, int64_t len) {
    double *o = out + i;
    const double *x = av + ia, *y = bv + ib;
    for (int64_t k = 0; k < len; ++k) {
      if constexpr (kKind == BinaryKind::kAdd)
        o[k] = x[k * sa] + y[k * sb];
      else if constexpr (kKind == BinaryKind::kSub)
        o[k] = x[k * sa] - y[k * sb];
      else
        o[k] = x[k * sa] * y[k * sb];
    }
  });
}

// Accumulates g into `dst` (indexed through the operand's stride), times
// `factor` when given (indexed through the other operand's stride).
void reduce_grad(const Broadcast &bc, bool first, std::span<const double> g,
                 double *dst, double sign, const double *factor) {
  for_each_run(bc, [&](int64_t i, int64_t ia, int64_t ib, int64_t sa,
                       int64_t sb, int64_t len) {
    const double *gr = g.data() + i;
    const int64_t io = first ? ia : ib, so = first ? sa : sb;
    const int64_t fo = first ? ib : ia, sf = first ? sb : sa;
    double *d = dst + io;
    if (factor == nullptr) {
      if (so == 0) {
        double acc = 0;
        for (int64_t k = 0; k < len; ++k)
          acc += gr[k];
        d[0] += sign * acc;
      } else {
        for (int64_t k = 0; k < len; ++k)
          d[k] += sign * gr[k];
      }
      return;
    }
    const double *fr = factor + fo;
    if (so == 0) {
      double acc = 0;
      for (int64_t k = 0; k < len; ++k)
        acc += gr[k] * fr[k * sf];
      d[0] += acc;
    } else {
      for (int64_t k = 0; k < len; ++k)
        d[k] += gr[k] * fr[k * sf];
    }
  });
}

Tensor binary(const Tensor &a, const Tensor &b, BinaryKind kind) {
  Broadcast bc = broadcast_shapes(a.shape(), b.shape());
  Buffer out(shape_size(bc.out));
  const double *av = a.data().data(), *bv = b.data().data();
  switch (kind) {
  case BinaryKind::kAdd:
    binary_forward<BinaryKind::kAdd>(bc, av, bv, out.data());
    break;
  case BinaryKind::kSub:
    binary_forward<BinaryKind::kSub>(bc, av, bv, out.data());
    break;
  case BinaryKind::kMul:
    binary_forward<BinaryKind::kMul>(bc, av, bv, out.data());
    break;
  }

  Tape *tape = common_tape({ &a, &b });
  Shape out_shape = bc.out;
  return emit(tape, std::move(out_shape), std::move(out),
              [tape, a, b, bc, kind](std::span<const double> g) {
                const bool mul = kind == BinaryKind::kMul;
                if (tracked(a))
                  reduce_grad(bc, true, g,
                              tape->grad_buffer(a.node()).data(), 1.0,
                              mul ? b.data().data() : nullptr);
                if (tracked(b))
                  reduce_grad(bc, false, g,
                              tape->grad_buffer(b.node()).data(),
                              kind == BinaryKind::kSub ? -1.0 : 1.0,
                              mul ? a.data().data() : nullptr);
              });
}

// y = f(x) elementwise; dydx(x, y) gives the local derivative.
template <class Fwd, class Deriv>
Tensor unary(const Tensor &a, Fwd fwd, Deriv dydx) {
  auto av = a.data();
  Buffer out(av.size());
  for (size_t i = 0; i < av.size(); ++i)
    out[i] = fwd(av[i]);
  Tape *tape = a.tape();
  if (tape == nullptr)
    return Tensor(a.shape(), std::move(out));
  auto saved = std::make_shared<Buffer>(out);
  return tape->record(a.shape(), std::move(out),
                      [tape, a, saved, dydx](std::span<const double> g) {
                        auto av = a.data();
                        auto &ga = tape->grad_buffer(a.node());
                        for (size_t i = 0; i < ga.size(); ++i)
                          ga[i] += g[i] * dydx(av[i], (*saved)[i]);
                      });
}

}  // namespace

Tensor linear(const Tensor &x, const Tensor &w, const Tensor &b) {
  if (x.ndim() != 2 || w.ndim() != 2 || x.dim(1) != w.dim(1))
    throw ShapeError("linear: x " + shape_str(x.shape()) + ", w "
                     + shape_str(w.shape()));
  const bool has_bias = !b.empty();
  if (has_bias && (b.ndim() != 1 || b.dim(0) != w.dim(0)))
    throw ShapeError("linear: bias " + shape_str(b.shape()));

  const int64_t rows = x.dim(0), in = x.dim(1), out = w.dim(0);
  Buffer y(rows * out);
  MMap ym(y.data(), rows, out);
  CMap xm(x.data().data(), rows, in);
  CMap wm(w.data().data(), out, in);
  ym.noalias() = xm * wm.transpose();
  if (has_bias) {
    Eigen::Map<const Eigen::RowVectorXd> bm(b.data().data(), out);
    ym.rowwise() += bm;
  }

  Tape *tape = common_tape({ &x, &w, &b });
  return emit(tape, { rows, out }, std::move(y),
              [tape, x, w, b, has_bias, rows, in,
               out](std::span<const double> g) {
                CMap gm(g.data(), rows, out);
                if (tracked(x)) {
                  MMap gx(tape->grad_buffer(x.node()).data(), rows, in);
                  gx.noalias() += gm * CMap(w.data().data(), out, in);
                }
                if (tracked(w)) {
                  MMap gw(tape->grad_buffer(w.node()).data(), out, in);
                  gw.noalias() +=
                      gm.transpose() * CMap(x.data().data(), rows, in);
                }
                if (has_bias && tracked(b)) {
                  Eigen::Map<Eigen::RowVectorXd> gb(
                      tape->grad_buffer(b.node()).data(), out);
                  gb += gm.colwise().sum();
                }
              });
}

Tensor matmul(const Tensor &a, const Tensor &b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
    throw ShapeError("matmul: " + shape_str(a.shape()) + " x "
                     + shape_str(b.shape()));
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Buffer y(m * n);
  MMap(y.data(), m, n).noalias() =
      CMap(a.data().data(), m, k) * CMap(b.data().data(), k, n);
  Tape *tape = common_tape({ &a, &b });
  return emit(tape, { m, n }, std::move(y),
              [tape, a, b, m, k, n](std::span<const double> g) {
                CMap gm(g.data(), m, n);
                if (tracked(a))
                  MMap(tape->grad_buffer(a.node()).data(), m, k).noalias() +=
                      gm * CMap(b.data().data(), k, n).transpose();
                if (tracked(b))
                  MMap(tape->grad_buffer(b.node()).data(), k, n).noalias() +=
                      CMap(a.data().data(), m, k).transpose() * gm;
              });
}

Tensor add(const Tensor &a, const Tensor &b) {
  return binary(a, b, BinaryKind::kAdd);
}

Tensor sub(const Tensor &a, const Tensor &b) {
  return binary(a, b, BinaryKind::kSub);
}

Tensor mul(const Tensor &a, const Tensor &b) {
  return binary(a, b, BinaryKind::kMul);
}

Tensor scale(const Tensor &a, double factor) {
  return unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor &a, double value) {
  return unary(
      a, [value](double x) { return x + value; },
      [](double, double) { return 1.0; });
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty())
    throw ShapeError("concat of nothing");
  const int nd = parts[0].ndim();
  axis = normalize_axis(axis, nd);
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  std::vector<int64_t> lens;
  for (const Tensor &p: parts) {
    if (p.ndim() != nd)
      throw ShapeError("concat: rank mismatch");
    for (int d = 0; d < nd; ++d)
      if (d != axis && p.dim(d) != parts[0].dim(d))
        throw ShapeError("concat: " + shape_str(p.shape()) + " vs "
                         + shape_str(parts[0].shape()));
    lens.push_back(p.dim(axis));
    out_shape[axis] += p.dim(axis);
  }
  const AxisSplit s = split_axis(out_shape, axis);
  Buffer out(shape_size(out_shape));
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    auto pv = parts[k].data();
    const int64_t block = lens[k] * s.inner;
    for (int64_t o = 0; o < s.outer; ++o)
      std::copy_n(pv.data() + o * block, block,
                  out.data() + o * s.len * s.inner + offset);
    offset += block;
  }

  Tape *tape = common_tape(parts);
  std::vector<Tensor> saved(parts.begin(), parts.end());
  return emit(tape, out_shape, std::move(out),
              [tape, saved, lens, s](std::span<const double> g) {
                int64_t offset = 0;
                for (size_t k = 0; k < saved.size(); ++k) {
                  const int64_t block = lens[k] * s.inner;
                  if (tracked(saved[k])) {
                    auto &gp = tape->grad_buffer(saved[k].node());
                    for (int64_t o = 0; o < s.outer; ++o) {
                      const double *src =
                          g.data() + o * s.len * s.inner + offset;
                      double *dst = gp.data() + o * block;
                      for (int64_t t = 0; t < block; ++t)
                        dst[t] += src[t];
                    }
                  }
                  offset += block;
                }
              });
}

Tensor concat(std::initializer_list<Tensor> parts, int axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor slice(const Tensor &a, int axis, int64_t begin, int64_t end) {
  axis = normalize_axis(axis, a.ndim());
  if (begin < 0 || end > a.dim(axis) || begin > end)
    throw ShapeError("slice bounds out of range");
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const AxisSplit s = split_axis(a.shape(), axis);
  const int64_t block = (end - begin) * s.inner;
  Buffer out(shape_size(out_shape));
  auto av = a.data();
  for (int64_t o = 0; o < s.outer; ++o)
    std::copy_n(av.data() + (o * s.len + begin) * s.inner, block,
                out.data() + o * block);
  Tape *tape = a.tape();
  return emit(tape, out_shape, std::move(out),
              [tape, a, s, begin, block](std::span<const double> g) {
                auto &ga = tape->grad_buffer(a.node());
                for (int64_t o = 0; o < s.outer; ++o) {
                  double *dst = ga.data() + (o * s.len + begin) * s.inner;
                  const double *src = g.data() + o * block;
                  for (int64_t t = 0; t < block; ++t)
                    dst[t] += src[t];
                }
              });
}

Tensor reshape(const Tensor &a, Shape shape) {
  if (shape_size(shape) != a.size())
    throw ShapeError("reshape " + shape_str(a.shape()) + " -> "
                     + shape_str(shape));
  Tape *tape = a.tape();
  Buffer v(a.data().begin(), a.data().end());
  return emit(tape, std::move(shape), std::move(v),
              [tape, a](std::span<const double> g) {
                tape->accumulate(a.node(), g);
              });
}

Tensor gather_rows(const Tensor &a, std::span<const int64_t> index) {
  if (a.ndim() < 1)
    throw ShapeError("gather_rows on a scalar");
  const int64_t rows = a.dim(0);
  const int64_t cols = rows == 0 ? 0 : a.size() / rows;
  Shape out_shape = a.shape();
  out_shape[0] = static_cast<int64_t>(index.size());
  Buffer out(index.size() * cols);
  auto av = a.data();
  for (size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= rows)
      throw ShapeError("gather_rows: index out of range");
    std::copy_n(av.data() + index[k] * cols, cols, out.data() + k * cols);
  }
  Tape *tape = a.tape();
  std::vector<int64_t> idx(index.begin(), index.end());
  return emit(tape, out_shape, std::move(out),
              [tape, a, idx = std::move(idx), cols](std::span<const double> g) {
                auto &ga = tape->grad_buffer(a.node());
                for (size_t k = 0; k < idx.size(); ++k) {
                  double *dst = ga.data() + idx[k] * cols;
                  const double *src = g.data() + k * cols;
                  for (int64_t c = 0; c < cols; ++c)
                    dst[c] += src[c];
                }
              });
}

Tensor pick(const Tensor &a, std::span<const int64_t> index) {
  if (a.ndim() != 2 || static_cast<int64_t>(index.size()) != a.dim(0))
    throw ShapeError("pick: " + shape_str(a.shape()));
  const int64_t cols = a.dim(1);
  Buffer out(index.size());
  for (size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || index[r] >= cols)
      throw ShapeError("pick: class index out of range");
    out[r] = a.data()[r * cols + index[r]];
  }
  Tape *tape = a.tape();
  std::vector<int64_t> idx(index.begin(), index.end());
  const Shape out_shape { static_cast<int64_t>(idx.size()) };
  return emit(tape, out_shape, std::move(out),
              [tape, a, idx = std::move(idx), cols](std::span<const double> g) {
                auto &ga = tape->grad_buffer(a.node());
                for (size_t r = 0; r < idx.size(); ++r)
                  ga[r * cols + idx[r]] += g[r];
              });
}

Tensor leaky_relu(const Tensor &a, double slope) {
  return unary(
      a, [slope](double x) { return x >= 0 ? x : slope * x; },
      [slope](double x, double) { return x >= 0 ? 1.0 : slope; });
}

Tensor relu(const Tensor &a) {
  return unary(
      a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor &a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0)
          return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor &a) {
  return unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor log(const Tensor &a) {
  return unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor pow(const Tensor &a, double p) {
  return unary(
      a, [p](double x) { return std::pow(x, p); },
      [p](double x, double) {
        if (p == 0.0)
          return 0.0;
        return p * std::pow(x, p - 1.0);
      });
}

Tensor softmax(const Tensor &a, int axis) {
  axis = normalize_axis(axis, a.ndim());
  const AxisSplit s = split_axis(a.shape(), axis);
  if (s.len == 0)
    throw ShapeError("softmax over an empty axis");
  auto av = a.data();
  Buffer out(av.size());
  for (int64_t o = 0; o < s.outer; ++o) {
    for (int64_t in = 0; in < s.inner; ++in) {
      const int64_t base = o * s.len * s.inner + in;
      double mx = av[base];
      for (int64_t k = 1; k < s.len; ++k)
        mx = std::max(mx, av[base + k * s.inner]);
      double z = 0;
      for (int64_t k = 0; k < s.len; ++k) {
        const double e = std::exp(av[base + k * s.inner] - mx);
        out[base + k * s.inner] = e;
        z += e;
      }
      for (int64_t k = 0; k < s.len; ++k)
        out[base + k * s.inner] /= z;
    }
  }
  Tape *tape = a.tape();
  if (tape == nullptr)
    return Tensor(a.shape(), std::move(out));
  auto y = std::make_shared<Buffer>(out);
  return tape->record(a.shape(), std::move(out),
                      [tape, a, y, s](std::span<const double> g) {
                        auto &ga = tape->grad_buffer(a.node());
                        for (int64_t o = 0; o < s.outer; ++o) {
                          for (int64_t in = 0; in < s.inner; ++in) {
                            const int64_t base = o * s.len * s.inner + in;
                            double dot = 0;
                            for (int64_t k = 0; k < s.len; ++k) {
                              const int64_t i = base + k * s.inner;
                              dot += g[i] * (*y)[i];
                            }
                            for (int64_t k = 0; k < s.len; ++k) {
                              const int64_t i = base + k * s.inner;
                              ga[i] += (*y)[i] * (g[i] - dot);
                            }
                          }
                        }
                      });
}

Tensor log_softmax(const Tensor &a, int axis) {
  axis = normalize_axis(axis, a.ndim());
  const AxisSplit s = split_axis(a.shape(), axis);
  if (s.len == 0)
    throw ShapeError("log_softmax over an empty axis");
  auto av = a.data();
  Buffer out(av.size());
  for (int64_t o = 0; o < s.outer; ++o) {
    for (int64_t in = 0; in < s.inner; ++in) {
      const int64_t base = o * s.len * s.inner + in;
      double mx = av[base];
      for (int64_t k = 1; k < s.len; ++k)
        mx = std::max(mx, av[base + k * s.inner]);
      double z = 0;
      for (int64_t k = 0; k < s.len; ++k)
        z += std::exp(av[base + k * s.inner] - mx);
      const double lse = mx + std::log(z);
      for (int64_t k = 0; k < s.len; ++k)
        out[base + k * s.inner] = av[base + k * s.inner] - lse;
    }
  }
  Tape *tape = a.tape();
  if (tape == nullptr)
    return Tensor(a.shape(), std::move(out));
  auto y = std::make_shared<Buffer>(out);
  return tape->record(a.shape(), std::move(out),
                      [tape, a, y, s](std::span<const double> g) {
                        auto &ga = tape->grad_buffer(a.node());
                        for (int64_t o = 0; o < s.outer; ++o) {
                          for (int64_t in = 0; in < s.inner; ++in) {
                            const int64_t base = o * s.len * s.inner + in;
                            double gsum = 0;
                            for (int64_t k = 0; k < s.len; ++k)
                              gsum += g[base + k * s.inner];
                            for (int64_t k = 0; k < s.len; ++k) {
                              const int64_t i = base + k * s.inner;
                              ga[i] += g[i] - std::exp((*y)[i]) * gsum;
                            }
                          }
                        }
                      });
}

Tensor layer_norm(const Tensor &a, int axis, double eps) {
  axis = normalize_axis(axis, a.ndim());
  const AxisSplit s = split_axis(a.shape(), axis);
  if (s.len < 1)
    throw ShapeError("layer_norm over an axis of size < 1");
  auto av = a.data();
  Buffer out(av.size());
  auto inv_std = std::make_shared<Buffer>(s.outer * s.inner);
  for (int64_t o = 0; o < s.outer; ++o) {
    for (int64_t in = 0; in < s.inner; ++in) {
      const int64_t base = o * s.len * s.inner + in;
      double mu = 0;
      for (int64_t k = 0; k < s.len; ++k)
        mu += av[base + k * s.inner];
      mu /= static_cast<double>(s.len);
      double var = 0;
      for (int64_t k = 0; k < s.len; ++k) {
        const double d = av[base + k * s.inner] - mu;
        var += d * d;
      }
      var /= static_cast<double>(s.len);
      const double r = 1.0 / std::sqrt(var + eps);
      (*inv_std)[o * s.inner + in] = r;
      for (int64_t k = 0; k < s.len; ++k)
        out[base + k * s.inner] = (av[base + k * s.inner] - mu) * r;
    }
  }
  Tape *tape = a.tape();
  if (tape == nullptr)
    return Tensor(a.shape(), std::move(out));
  auto y = std::make_shared<Buffer>(out);
  return tape->record(
      a.shape(), std::move(out),
      [tape, a, y, inv_std, s](std::span<const double> g) {
        auto &ga = tape->grad_buffer(a.node());
        const double n = static_cast<double>(s.len);
        for (int64_t o = 0; o < s.outer; ++o) {
          for (int64_t in = 0; in < s.inner; ++in) {
            const int64_t base = o * s.len * s.inner + in;
            double gmean = 0, gymean = 0;
            for (int64_t k = 0; k < s.len; ++k) {
              const int64_t i = base + k * s.inner;
              gmean += g[i];
              gymean += g[i] * (*y)[i];
            }
            gmean /= n;
            gymean /= n;
            const double r = (*inv_std)[o * s.inner + in];
            for (int64_t k = 0; k < s.len; ++k) {
              const int64_t i = base + k * s.inner;
              ga[i] += r * (g[i] - gmean - (*y)[i] * gymean);
            }
          }
        }
      });
}

Tensor sum(const Tensor &a) {
  auto av = a.data();
  const double total = std::accumulate(av.begin(), av.end(), 0.0);
  Tape *tape = a.tape();
  return emit(tape, {}, { total }, [tape, a](std::span<const double> g) {
    auto &ga = tape->grad_buffer(a.node());
    for (double &x: ga)
      x += g[0];
  });
}

Tensor mean(const Tensor &a) {
  if (a.empty())
    throw ShapeError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor sum(const Tensor &a, int axis) {
  axis = normalize_axis(axis, a.ndim());
  const AxisSplit s = split_axis(a.shape(), axis);
  auto av = a.data();
  Buffer out(s.outer * s.inner, 0.0);
  for (int64_t o = 0; o < s.outer; ++o)
    for (int64_t k = 0; k < s.len; ++k) {
      const double *src = av.data() + (o * s.len + k) * s.inner;
      double *dst = out.data() + o * s.inner;
      for (int64_t in = 0; in < s.inner; ++in)
        dst[in] += src[in];
    }
  Tape *tape = a.tape();
  return emit(tape, drop_axis(a.shape(), axis), std::move(out),
              [tape, a, s](std::span<const double> g) {
                auto &ga = tape->grad_buffer(a.node());
                for (int64_t o = 0; o < s.outer; ++o)
                  for (int64_t k = 0; k < s.len; ++k) {
                    double *dst = ga.data() + (o * s.len + k) * s.inner;
                    const double *src = g.data() + o * s.inner;
                    for (int64_t in = 0; in < s.inner; ++in)
                      dst[in] += src[in];
                  }
              });
}

Tensor mean(const Tensor &a, int axis) {
  const int64_t len = a.dim(axis);
  if (len == 0)
    throw ShapeError("mean over an empty axis");
  return scale(sum(a, axis), 1.0 / static_cast<double>(len));
}

Tensor l2_norm(const Tensor &a, int axis, double eps) {
  axis = normalize_axis(axis, a.ndim());
  const AxisSplit s = split_axis(a.shape(), axis);
  auto av = a.data();
  Buffer out(s.outer * s.inner, 0.0);
  for (int64_t o = 0; o < s.outer; ++o)
    for (int64_t in = 0; in < s.inner; ++in) {
      double acc = eps;
      for (int64_t k = 0; k < s.len; ++k) {
        const double x = av[(o * s.len + k) * s.inner + in];
        acc += x * x;
      }
      out[o * s.inner + in] = std::sqrt(acc);
    }
  Tape *tape = a.tape();
  if (tape == nullptr)
    return Tensor(drop_axis(a.shape(), axis), std::move(out));
  auto y = std::make_shared<Buffer>(out);
  return tape->record(drop_axis(a.shape(), axis), std::move(out),
                      [tape, a, y, s](std::span<const double> g) {
                        auto &ga = tape->grad_buffer(a.node());
                        auto av = a.data();
                        for (int64_t o = 0; o < s.outer; ++o)
                          for (int64_t in = 0; in < s.inner; ++in) {
                            const double n = (*y)[o * s.inner + in];
                            if (n == 0.0)
                              continue;
                            const double f = g[o * s.inner + in] / n;
                            for (int64_t k = 0; k < s.len; ++k) {
                              const int64_t i = (o * s.len + k) * s.inner + in;
                              ga[i] += f * av[i];
                            }
                          }
                      });
}

Tensor rbf_encode(const Tensor &d, std::span<const double> centers,
                  double width) {
  if (centers.empty() || !(width > 0))
    throw ShapeError("rbf_encode needs centers and a positive width");
  const int64_t k = static_cast<int64_t>(centers.size());
  Shape out_shape = d.shape();
  out_shape.push_back(k);
  auto dv = d.data();
  const double inv2s2 = 1.0 / (2.0 * width * width);
  Buffer out(dv.size() * k);
  for (size_t i = 0; i < dv.size(); ++i)
    for (int64_t c = 0; c < k; ++c) {
      const double t = dv[i] - centers[c];
      out[i * k + c] = std::exp(-t * t * inv2s2);
    }
  Tape *tape = d.tape();
  if (tape == nullptr)
    return Tensor(std::move(out_shape), std::move(out));
  auto y = std::make_shared<Buffer>(out);
  Buffer mu(centers.begin(), centers.end());
  return tape->record(std::move(out_shape), std::move(out),
                      [tape, d, y, mu, k, inv2s2](std::span<const double> g) {
                        auto &gd = tape->grad_buffer(d.node());
                        auto dv = d.data();
                        for (size_t i = 0; i < gd.size(); ++i) {
                          double acc = 0;
                          for (int64_t c = 0; c < k; ++c)
                            acc += g[i * k + c] * (*y)[i * k + c]
                                   * (-2.0 * inv2s2 * (dv[i] - mu[c]));
                          gd[i] += acc;
                        }
                      });
}

}  // namespace ligpose::ad
