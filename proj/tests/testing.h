//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit and acceptance tests.

#ifndef LIGPOSE_TESTS_TESTING_H_
#define LIGPOSE_TESTS_TESTING_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "ligpose/chemio.h"
#include "ligpose/dataset.h"
#include "ligpose/ops.h"
#include "ligpose/rng.h"
#include "ligpose/synth.h"
#include "ligpose/tensor.h"

namespace ligpose::fx {

inline Tensor random_tensor(const Shape &shape, std::mt19937_64 &rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape_size(shape));
  for (double &x: v)
    x = u(rng);
  return Tensor(shape, std::move(v));
}

// Central-difference check of d f / d inputs. Returns the worst relative
// error over the inputs, ||g_ad - g_fd|| / max(||g_fd||, floor).
inline double gradcheck(
    const std::function<Tensor(const std::vector<Tensor> &)> &f,
    const std::vector<Tensor> &inputs, double h = 1e-6, double floor = 1e-7) {
  Tape tape;
  std::vector<Tensor> watched;
  for (const Tensor &t: inputs)
    watched.push_back(tape.watch(t));
  const Tensor out = f(watched);
  tape.backward(out);

  double worst = 0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    const std::vector<double> analytic = tape.grad(watched[k]);
    std::vector<double> numeric(analytic.size());
    for (size_t i = 0; i < numeric.size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<Tensor> moved;
        for (size_t j = 0; j < inputs.size(); ++j) {
          Tensor c(inputs[j].shape(),
                   std::vector<double>(inputs[j].data().begin(),
                                       inputs[j].data().end()));
          if (j == k)
            c.mutable_data()[i] += delta;
          moved.push_back(c);
        }
        return f(moved).item();
      };
      numeric[i] = (eval(h) - eval(-h)) / (2 * h);
    }
    double diff = 0, norm = 0;
    for (size_t i = 0; i < numeric.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      norm += numeric[i] * numeric[i];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), floor));
  }
  return worst;
}

// Contract an arbitrary-shaped output to a scalar with fixed random weights
// so every output element contributes a distinct gradient.
inline Tensor contract(const Tensor &y, uint64_t seed = 99) {
  std::mt19937_64 rng(seed);
  return ad::sum(ad::mul(y, random_tensor(y.shape(), rng)));
}

// Gradient check of every differentiable primitive: (name, relative error).
inline std::vector<std::pair<std::string, double>> primitive_gradchecks(
    double h) {
  using namespace ad;
  std::mt19937_64 rng(7);
  std::vector<std::pair<std::string, double>> out;
  auto check = [&](const char *name,
                   const std::function<Tensor(const std::vector<Tensor> &)> &f,
                   const std::vector<Tensor> &in) {
    out.emplace_back(name, gradcheck(f, in, h));
  };
  const Tensor x = random_tensor({ 4, 5 }, rng);
  const Tensor w = random_tensor({ 3, 5 }, rng);
  const Tensor bias = random_tensor({ 3 }, rng);
  const Tensor m = random_tensor({ 5, 2 }, rng);
  const Tensor row = random_tensor({ 5 }, rng);
  const Tensor col = random_tensor({ 4, 1 }, rng);
  const Tensor pos = random_tensor({ 4, 5 }, rng, 0.5, 2.0);
  const Tensor t3 = random_tensor({ 3, 4, 2 }, rng);
  // Keep elementwise inputs away from the kinks at 0.
  std::vector<double> kinkless(20);
  for (size_t i = 0; i < kinkless.size(); ++i)
    kinkless[i] = (i % 2 ? 1 : -1) * (0.1 + 0.05 * i);
  const Tensor away({ 4, 5 }, kinkless);

  check("linear", [&](auto v) { return contract(linear(v[0], v[1], v[2])); },
        { x, w, bias });
  check("matmul", [&](auto v) { return contract(matmul(v[0], v[1])); }, { x, m });
  check("add", [&](auto v) { return contract(add(v[0], v[1])); }, { x, row });
  check("add col", [&](auto v) { return contract(add(v[0], v[1])); }, { x, col });
  check("sub", [&](auto v) { return contract(sub(v[1], v[0])); }, { x, row });
  check("mul", [&](auto v) { return contract(mul(v[0], v[1])); }, { x, pos });
  check("mul bcast", [&](auto v) { return contract(mul(v[0], v[1])); },
        { x, col });
  check("mul 3d", [&](auto v) { return contract(mul(v[0], v[1])); },
        { t3, random_tensor({ 3, 1, 2 }, rng) });
  check("scale", [&](auto v) { return contract(scale(v[0], -1.7)); }, { x });
  check("add_scalar", [&](auto v) { return contract(add_scalar(v[0], 0.3)); },
        { x });
  check("concat0", [&](auto v) { return contract(concat({ v[0], v[1] }, 0)); },
        { x, pos });
  check("concat1",
        [&](auto v) { return contract(concat({ v[0], v[1] }, 1)); },
        { x, col });
  check("slice", [&](auto v) { return contract(slice(v[0], 1, 1, 4)); }, { x });
  check("reshape", [&](auto v) { return contract(reshape(v[0], { 10, 2 })); },
        { x });
  const std::vector<int64_t> idx { 3, 0, 3, 1, 2, 2 };
  check("gather_rows", [&](auto v) { return contract(gather_rows(v[0], idx)); },
        { x });
  const std::vector<int64_t> cls { 4, 0, 2, 2 };
  check("pick", [&](auto v) { return contract(pick(v[0], cls)); }, { x });
  check("leaky_relu",
        [&](auto v) { return contract(leaky_relu(v[0], 0.01)); }, { away });
  check("relu", [&](auto v) { return contract(relu(v[0])); }, { away });
  check("sigmoid", [&](auto v) { return contract(sigmoid(v[0])); }, { x });
  check("exp", [&](auto v) { return contract(exp(v[0])); }, { x });
  check("log", [&](auto v) { return contract(log(v[0])); }, { pos });
  check("pow", [&](auto v) { return contract(pow(v[0], -1.5)); }, { pos });
  check("softmax", [&](auto v) { return contract(softmax(v[0], 1)); }, { x });
  check("softmax mid",
        [&](auto v) { return contract(softmax(v[0], 1)); }, { t3 });
  check("log_softmax",
        [&](auto v) { return contract(log_softmax(v[0], 1)); }, { x });
  check("layer_norm",
        [&](auto v) { return contract(layer_norm(v[0], 1)); }, { x });
  check("sum", [&](auto v) { return sum(mul(v[0], v[0])); }, { x });
  check("sum axis", [&](auto v) { return contract(sum(v[0], 1)); }, { t3 });
  check("mean", [&](auto v) { return mean(mul(v[0], v[0])); }, { x });
  check("mean axis", [&](auto v) { return contract(mean(v[0], 0)); }, { t3 });
  check("l2_norm", [&](auto v) { return contract(l2_norm(v[0], 1)); }, { x });
  const std::vector<double> centers { 0.0, 0.4, 0.8, 1.2 };
  check("rbf_encode",
        [&](auto v) { return contract(rbf_encode(v[0], centers, 0.4)); },
        { random_tensor({ 6 }, rng, 0.0, 1.5) });
  return out;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

// Applies x -> R x + t to every coordinate triple.
inline std::vector<double> transform(const std::vector<double> &xyz,
                                     const Eigen::Matrix3d &r,
                                     const Eigen::Vector3d &t) {
  std::vector<double> out(xyz.size());
  for (size_t i = 0; i + 2 < xyz.size(); i += 3) {
    const Eigen::Vector3d p =
        r * Eigen::Vector3d(xyz[i], xyz[i + 1], xyz[i + 2]) + t;
    out[i] = p.x();
    out[i + 1] = p.y();
    out[i + 2] = p.z();
  }
  return out;
}

inline std::vector<double> flat(const LigandMol &mol) {
  std::vector<double> out;
  for (const LigandAtom &a: mol.atoms())
    out.insert(out.end(), { a.pos.x(), a.pos.y(), a.pos.z() });
  return out;
}

// Reduced network used where the light configuration would be slow.
inline NetConfig small_net_config() {
  NetConfig c;
  c.d_f = 16;
  c.d_e = 8;
  c.n_heads = 2;
  c.n_layers = 2;
  c.n_cycles = 2;
  c.n_ens = 3;
  c.d_r = 8;
  return c;
}

// Small complex (<= 12 nodes) for gradient and unit checks.
inline SynthComplex tiny_complex(uint64_t seed) {
  SynthOptions o;
  o.min_ligand_atoms = 4;
  o.max_ligand_atoms = 5;
  o.num_residues = 2;
  o.max_pocket_atoms = 7;
  for (uint64_t s = seed;; ++s) {
    SynthComplex c = synth_complex("tiny", s, o);
    int atoms = c.ligand.num_atoms();
    for (const Residue &r: c.protein.residues)
      atoms += static_cast<int>(r.atoms.size());
    if (atoms <= 12)
      return c;
  }
}

// Every permutation of 0..n-1 that preserves elements, charges, aromatic
// flags and the bond table (with orders): the brute-force automorphism set.
inline std::vector<std::vector<int>> brute_force_automorphisms(
    const LigandMol &mol) {
  const int n = mol.num_atoms();
  std::vector<std::vector<int>> order(n, std::vector<int>(n, 0));
  for (const LigandBond &b: mol.bonds())
    order[b.i][b.j] = order[b.j][b.i] = static_cast<int>(b.order);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (int i = 0; ok && i < n; ++i) {
      const LigandAtom &a = mol.atom(i), &b = mol.atom(perm[i]);
      ok = a.element == b.element && a.formal_charge == b.formal_charge
           && a.aromatic == b.aromatic;
      for (int j = 0; ok && j < n; ++j)
        ok = order[i][j] == order[perm[i]][perm[j]];
    }
    if (ok)
      out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline LigandMol phenol() {
  std::vector<LigandAtom> atoms(7);
  for (int i = 0; i < 6; ++i) {
    atoms[i].element = "C";
    atoms[i].aromatic = true;
    const double t = 2 * M_PI * i / 6;
    atoms[i].pos = Vector3d(1.39 * std::cos(t), 1.39 * std::sin(t), 0);
  }
  atoms[6].element = "O";
  atoms[6].pos = Vector3d(2.75, 0, 0);
  std::vector<LigandBond> bonds;
  for (int i = 0; i < 6; ++i)
    bonds.push_back({ i, (i + 1) % 6, BondOrder::kAromatic });
  bonds.push_back({ 0, 6, BondOrder::kSingle });
  return LigandMol(atoms, bonds);
}

}  // namespace ligpose::fx

#endif  // LIGPOSE_TESTS_TESTING_H_
