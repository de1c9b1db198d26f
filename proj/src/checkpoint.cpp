//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ligpose {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

constexpr char kMagic[8] = { 'L', 'P', 'C', 'K', 'P', 'T', '\0', '\0' };
constexpr uint32_t kVersion = 1;

class Writer {
public:
  explicit Writer(CheckpointDtype dtype): dtype_(dtype) { }

  template <class T>
  void put(T v) {
    out_.append(reinterpret_cast<const char *>(&v), sizeof(T));
  }

  void values(std::span<const double> v) {
    for (double x: v) {
      if (dtype_ == CheckpointDtype::kF32)
        put(static_cast<float>(x));
      else
        put(x);
    }
  }

  std::string take() { return std::move(out_); }
  std::string &raw() { return out_; }

private:
  CheckpointDtype dtype_;
  std::string out_;
};

class Reader {
public:
  explicit Reader(std::string_view in): in_(in) { }

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > in_.size())
      throw ParseError("checkpoint truncated");
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(size_t n) {
    if (pos_ + n > in_.size())
      throw ParseError("checkpoint truncated");
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::vector<double> values(int64_t n, CheckpointDtype dtype) {
    std::vector<double> v(n);
    for (double &x: v)
      x = dtype == CheckpointDtype::kF32 ? get<float>() : get<double>();
    return v;
  }

  bool done() const { return pos_ == in_.size(); }

private:
  std::string_view in_;
  size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint &ckpt,
                                 CheckpointDtype dtype) {
  Writer w(dtype);
  w.raw().append(kMagic, sizeof(kMagic));
  w.put(kVersion);
  w.put(static_cast<uint32_t>(dtype));
  const NetConfig &n = ckpt.net;
  for (int v: { n.d_f, n.d_e, n.n_heads, n.n_layers, n.n_cycles, n.n_ens,
                n.d_r, n.max_nodes })
    w.put(static_cast<int32_t>(v));
  for (double v: { n.leaky_slope, n.rbf_max, n.init_sigma })
    w.put(v);
  w.put(static_cast<int64_t>(ckpt.step));
  w.put(static_cast<int32_t>(ckpt.epoch));
  w.put(static_cast<int64_t>(ckpt.adam ? ckpt.adam->t : 0));
  w.put(static_cast<uint32_t>(ckpt.adam ? 1 : 0));

  const auto &tensors = ckpt.params.tensors();
  w.put(static_cast<uint32_t>(tensors.size()));
  for (const auto &[name, t]: tensors) {
    w.put(static_cast<uint32_t>(name.size()));
    w.raw().append(name);
    w.put(static_cast<uint32_t>(t.ndim()));
    for (int64_t d: t.shape())
      w.put(d);
    w.values(t.data());
  }
  if (ckpt.adam) {
    for (const auto &[name, t]: tensors) {
      for (const auto *moments: { &ckpt.adam->m, &ckpt.adam->v }) {
        auto it = moments->find(name);
        if (it == moments->end())
          w.values(std::vector<double>(t.size(), 0.0));
        else if (static_cast<int64_t>(it->second.size()) != t.size())
          throw ShapeError("Adam moment size mismatch for '" + name + "'");
        else
          w.values(it->second);
      }
    }
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw ParseError("not a LigPose checkpoint");
  const auto version = r.get<uint32_t>();
  if (version != kVersion)
    throw ParseError("unsupported checkpoint version "
                     + std::to_string(version));
  const auto dtype_tag = r.get<uint32_t>();
  if (dtype_tag > 1)
    throw ParseError("unknown checkpoint dtype");
  const auto dtype = static_cast<CheckpointDtype>(dtype_tag);

  Checkpoint c;
  NetConfig &n = c.net;
  for (int *v: { &n.d_f, &n.d_e, &n.n_heads, &n.n_layers, &n.n_cycles,
                 &n.n_ens, &n.d_r, &n.max_nodes })
    *v = r.get<int32_t>();
  for (double *v: { &n.leaky_slope, &n.rbf_max, &n.init_sigma })
    *v = r.get<double>();
  try {
    n.validate();
  } catch (const InputError &e) {
    throw ParseError(std::string("checkpoint network config: ") + e.what());
  }
  c.step = r.get<int64_t>();
  c.epoch = r.get<int32_t>();
  const auto adam_t = r.get<int64_t>();
  const bool has_adam = r.get<uint32_t>() != 0;

  const auto count = r.get<uint32_t>();
  std::vector<std::string> names;
  for (uint32_t k = 0; k < count; ++k) {
    const std::string name = r.bytes(r.get<uint32_t>());
    const auto ndim = r.get<uint32_t>();
    if (ndim > 8)
      throw ParseError("checkpoint tensor '" + name + "' has bad rank");
    Shape shape(ndim);
    for (int64_t &d: shape) {
      d = r.get<int64_t>();
      if (d < 0 || d > (int64_t { 1 } << 32))
        throw ParseError("checkpoint tensor '" + name + "' has bad shape");
    }
    c.params.set(name, Tensor(shape, r.values(shape_size(shape), dtype)));
    names.push_back(name);
  }
  if (has_adam) {
    AdamState adam;
    adam.t = adam_t;
    for (const std::string &name: names) {
      const int64_t size = c.params[name].size();
      adam.m[name] = r.values(size, dtype);
      adam.v[name] = r.values(size, dtype);
    }
    c.adam = std::move(adam);
  }
  if (!r.done())
    throw ParseError("checkpoint has trailing bytes");
  return c;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw InputError("failed writing '" + path + "'");
}

void save_checkpoint(const std::string &path, const Checkpoint &ckpt,
                     CheckpointDtype dtype) {
  write_file(path, serialize_checkpoint(ckpt, dtype));
}

Checkpoint load_checkpoint(const std::string &path) {
  return deserialize_checkpoint(read_file(path));
}

}  // namespace ligpose
