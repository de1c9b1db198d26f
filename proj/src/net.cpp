//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/net.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ligpose/metrics.h"
#include "ligpose/ops.h"
#include "ligpose/rng.h"

namespace ligpose {

using namespace ad;

namespace {

class Initializer {
public:
  Initializer(ParamSet &p, uint64_t seed): p_(p), rng_(seed) { }

  // Glorot-uniform weight [out, in] and zero bias, scaled by `gain`.
  void linear(const std::string &name, int64_t out, int64_t in,
              double gain = 1.0) {
    const double a = gain * std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-a, a);
    std::vector<double> w(out * in);
    for (double &x: w)
      x = u(rng_);
    p_.set(name + ".w", Tensor({ out, in }, std::move(w)));
    p_.set(name + ".b", Tensor({ out }, 0.0));
  }

  void norm(const std::string &name, int64_t dim) {
    p_.set(name + ".gamma", Tensor({ dim }, 1.0));
    p_.set(name + ".beta", Tensor({ dim }, 0.0));
  }

  void gate(const std::string &name, int64_t dim) {
    linear(name, dim, 3 * dim);
    norm(name, dim);
  }

private:
  ParamSet &p_;
  std::mt19937_64 rng_;
};

}  // namespace

ParamSet init_params(const NetConfig &cfg, uint64_t seed) {
  cfg.validate();
  ParamSet p;
  Initializer init(p, seed);
  const int64_t df = cfg.d_f, de = cfg.d_e, dd = cfg.d_e + cfg.d_r;

  init.linear("in.prot", df, kProteinFeatDim);
  init.linear("in.lig", df, kLigandFeatDim);
  init.linear("in.edge", de, kEdgeFeatDim);
  init.gate("rc.gf", df);
  init.gate("rc.ge", de);

  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string b = block_name(l);
    init.linear(b + ".we", df, dd);
    init.linear(b + ".wq", df, df);
    init.linear(b + ".wk", df, df);
    init.linear(b + ".wv", df, df);
    init.linear(b + ".wt", df, dd);
    init.linear(b + ".wfo", df, 2 * df);
    init.linear(b + ".weo", de, df);
    init.gate(b + ".gf1", df);
    init.gate(b + ".ge1", de);
    init.linear(b + ".ff1", df, df);
    init.linear(b + ".ff2", df, df);
    init.gate(b + ".gf2", df);
    init.linear(b + ".fe1", de, de);
    init.linear(b + ".fe2", de, de);
    init.gate(b + ".ge2", de);
    // Small coordinate steps at initialization keep early poses bounded.
    init.linear(b + ".wx", 1, cfg.d_h(), 0.01);
    p.set(b + ".lambda", Tensor({ 1, cfg.n_heads }, 1.0 / cfg.n_heads));
  }

  init.norm("pool", df + de);
  init.linear("aff1", df, df + de);
  init.linear("aff2", 1, df);
  init.linear("bind1", df, df + de);
  init.linear("bind2", 1, df);

  init.linear("mcm.atom1", df, df);
  init.linear("mcm.atom2", kNumAtomNames, df);
  init.linear("mcm.res1", df, df);
  init.linear("mcm.res2", kNumResidueTypes, df);
  init.linear("mcm.elem1", df, df);
  init.linear("mcm.elem2", kNumLigandElements, df);
  init.linear("mcm.bond1", de, de);
  init.linear("mcm.bond2", edge_feat::kNumBondTypes, de);
  return p;
}

// ---- block pieces ---------------------------------------------------------

std::string block_name(int layer) { return "blk" + std::to_string(layer); }

std::vector<double> rbf_centers(const NetConfig &cfg) {
  std::vector<double> c(cfg.d_r);
  for (int k = 0; k < cfg.d_r; ++k)
    c[k] = cfg.d_r == 1 ? 0.0 : cfg.rbf_max * k / (cfg.d_r - 1);
  return c;
}

double rbf_width(const NetConfig &cfg) {
  return cfg.d_r == 1 ? cfg.rbf_max : cfg.rbf_max / (cfg.d_r - 1);
}

PairIndex::PairIndex(int64_t n_): n(n_) {
  i.resize(n * n);
  j.resize(n * n);
  off_diagonal.resize(n * n);
  for (int64_t a = 0; a < n; ++a)
    for (int64_t b = 0; b < n; ++b) {
      i[a * n + b] = a;
      j[a * n + b] = b;
      off_diagonal[a * n + b] = a == b ? 0.0 : 1.0;
    }
}

Geometry pair_geometry(const Tensor &x, const PairIndex &pairs) {
  Geometry g;
  g.diff = sub(gather_rows(x, pairs.i), gather_rows(x, pairs.j));
  g.dist = l2_norm(g.diff, 1);
  return g;
}

Tensor encode_distance(const Geometry &geo, const Tensor &e,
                       const NetConfig &cfg) {
  const auto centers = rbf_centers(cfg);
  return concat({ rbf_encode(geo.dist, centers, rbf_width(cfg)), e }, 1);
}

Attention attention(const ParamSet &p, const std::string &b,
                    const NetConfig &cfg, const Tensor &f, const Tensor &d,
                    const PairIndex &pairs) {
  const int64_t n = pairs.n, h = cfg.n_heads, dh = cfg.d_h();
  const Tensor k = mul(gather_rows(lin(p, b + ".wk", f), pairs.j),
                       leaky_relu(lin(p, b + ".we", d), cfg.leaky_slope));
  const Tensor q = gather_rows(lin(p, b + ".wq", f), pairs.i);
  Attention out;
  out.a = mul(q, k);
  Tensor logits = sum(reshape(out.a, { n * n, h, dh }), 2);
  logits = scale(logits, 1.0 / std::sqrt(static_cast<double>(dh)));
  out.omega = softmax(reshape(logits, { n, n, h }), 1);
  return out;
}

Tensor gate(const ParamSet &p, const std::string &name, const Tensor &fresh,
            const Tensor &prev, GateMode mode) {
  Tensor mixed;
  switch (mode) {
  case GateMode::kLearned: {
    const Tensor g = sigmoid(lin(p, name, concat({ fresh, prev, sub(fresh, prev) }, -1)));
    mixed = add(mul(g, fresh), prev);
    break;
  }
  case GateMode::kClosed:
    mixed = prev;
    break;
  case GateMode::kOpen:
    mixed = add(fresh, prev);
    break;
  }
  return affine_norm(p, name, mixed);
}

FeatureUpdate aggregate_update(const ParamSet &p, const std::string &b,
                               const NetConfig &cfg, const Tensor &f,
                               const Tensor &e, const Tensor &d,
                               const Attention &att, const PairIndex &pairs,
                               const BlockOptions &opts) {
  const int64_t n = pairs.n, h = cfg.n_heads, dh = cfg.d_h();
  const double slope = cfg.leaky_slope;
  const Tensor w = reshape(att.omega, { n * n, h, 1 });

  // Per head: Concat(v_i * sum_j w_ij, sum_j w_ij v_j); the weights of a
  // row sum to one.
  const Tensor v = lin(p, b + ".wv", f);
  const Tensor vj = reshape(gather_rows(v, pairs.j), { n * n, h, dh });
  const Tensor agg = sum(reshape(mul(w, vj), { n, n, h * dh }), 1);
  const Tensor per_head = concat(
      { reshape(v, { n, h, 1, dh }), reshape(agg, { n, h, 1, dh }) }, 2);
  const Tensor f_hat = lin(p, b + ".wfo", reshape(per_head, { n, 2 * h * dh }));

  const Tensor t = reshape(leaky_relu(lin(p, b + ".wt", d), slope),
                           { n * n, h, dh });
  const Tensor e_hat = lin(p, b + ".weo", reshape(mul(w, t), { n * n, h * dh }));

  FeatureUpdate out;
  const Tensor f1 = gate(p, b + ".gf1", f_hat, f, opts.gate);
  const Tensor e1 = gate(p, b + ".ge1", e_hat, e, opts.gate);
  const Tensor f_ff =
      lin(p, b + ".ff2", leaky_relu(lin(p, b + ".ff1", f1), slope));
  const Tensor e_ff =
      lin(p, b + ".fe2", leaky_relu(lin(p, b + ".fe1", e1), slope));
  out.f = gate(p, b + ".gf2", f_ff, f1, opts.gate);
  out.e = gate(p, b + ".ge2", e_ff, e1, opts.gate);
  return out;
}

Tensor coord_update(const ParamSet &p, const std::string &b,
                    const NetConfig &cfg, const Tensor &x, const Geometry &geo,
                    const Tensor &a, const PairIndex &pairs,
                    std::span<const double> update_mask) {
  const int64_t n = pairs.n, h = cfg.n_heads, dh = cfg.d_h();
  if (static_cast<int64_t>(update_mask.size()) != n)
    throw ShapeError("coord_update: mask length does not match node count");
  // s[ij, h] = W_x a_ij^h + b; w_ij = sum_h lambda_h s[ij, h].
  const Tensor s = reshape(lin(p, b + ".wx", reshape(a, { n * n * h, dh })),
                           { n * n, h });
  Tensor w = linear(s, p[b + ".lambda"]);
  w = mul(w, Tensor({ n * n, 1 }, pairs.off_diagonal));
  const Tensor unit =
      mul(geo.diff, pow(reshape(geo.dist, { n * n, 1 }), -1.0));
  const Tensor delta = sum(reshape(mul(unit, w), { n, n, 3 }), 1);
  const Tensor mask(
      { n, 1 }, std::vector<double>(update_mask.begin(), update_mask.end()));
  return add(x, mul(delta, mask));
}

// ---- cycles ---------------------------------------------------------------

Tensor input_features(const ParamSet &p, const ComplexGraph &g) {
  const int64_t n = g.num_nodes, l = g.num_ligand;
  const Tensor all({ n, kNodeFeatDim }, g.node_feats);
  std::vector<Tensor> parts;
  if (l > 0)
    parts.push_back(
        lin(p, "in.lig", slice(slice(all, 0, 0, l), 1, 0, kLigandFeatDim)));
  if (n > l)
    parts.push_back(lin(p, "in.prot", slice(all, 0, l, n)));
  return parts.size() == 1 ? parts[0] : concat(parts, 0);
}

Tensor input_edges(const ParamSet &p, const ComplexGraph &g) {
  const int64_t n = g.num_nodes;
  return lin(p, "in.edge", Tensor({ n * n, kEdgeFeatDim }, g.edge_feats));
}

namespace {

std::vector<int64_t> core_pair_rows(int64_t n, int64_t c) {
  std::vector<int64_t> rows;
  rows.reserve(c * c);
  for (int64_t i = 0; i < c; ++i)
    for (int64_t j = 0; j < c; ++j)
      rows.push_back(i * n + j);
  return rows;
}

}  // namespace

BlockTrace forward_cycle(const ParamSet &p, const NetConfig &cfg,
                         const SubGraph &sub, const Tensor &x0,
                         std::span<const double> update_mask,
                         const Carry *carry, const BlockOptions &opts) {
  const ComplexGraph &g = sub.graph;
  const int64_t n = g.num_nodes;
  if (x0.shape() != Shape { n, 3 })
    throw ShapeError("forward_cycle: x0 must be [N, 3], got "
                     + shape_str(x0.shape()));
  const PairIndex pairs(n);

  Tensor f = input_features(p, g);
  Tensor e = input_edges(p, g);
  if (carry != nullptr) {
    const int64_t c = sub.num_core;
    if (static_cast<int64_t>(carry->core_parent.size()) != c
        || !std::equal(carry->core_parent.begin(), carry->core_parent.end(),
                       sub.parent.begin())
        || carry->f_core.shape() != Shape { c, cfg.d_f }
        || carry->e_core.shape() != Shape { c * c, cfg.d_e })
      throw ShapeError("forward_cycle: carry does not match the sub-graph core");
    const Tensor merged =
        gate(p, "rc.gf", slice(f, 0, 0, c), carry->f_core, opts.gate);
    f = c == n ? merged : concat({ merged, slice(f, 0, c, n) }, 0);

    const auto cc = core_pair_rows(n, c);
    const Tensor merged_e =
        gate(p, "rc.ge", gather_rows(e, cc), carry->e_core, opts.gate);
    std::vector<int64_t> pick_rows(n * n);
    for (int64_t r = 0; r < n * n; ++r)
      pick_rows[r] = r;
    for (int64_t k = 0; k < c * c; ++k)
      pick_rows[cc[k]] = n * n + k;
    e = gather_rows(concat({ e, merged_e }, 0), pick_rows);
  }

  BlockTrace trace;
  Tensor x = x0;
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string b = block_name(l);
    const Geometry geo = pair_geometry(x, pairs);
    const Tensor d = encode_distance(geo, e, cfg);
    const Attention att = attention(p, b, cfg, f, d, pairs);
    const FeatureUpdate upd =
        aggregate_update(p, b, cfg, f, e, d, att, pairs, opts);
    x = coord_update(p, b, cfg, x, geo, att.a, pairs, update_mask);
    f = upd.f;
    e = upd.e;
    trace.blocks.push_back({ f, e, x });
  }
  return trace;
}

Carry make_carry(const BlockTrace &trace, const SubGraph &sub) {
  const int64_t n = sub.graph.num_nodes, c = sub.num_core;
  Carry carry;
  carry.f_core = slice(trace.last().f, 0, 0, c).detach();
  carry.e_core = gather_rows(trace.last().e, core_pair_rows(n, c)).detach();
  carry.core_parent.assign(sub.parent.begin(), sub.parent.begin() + c);
  return carry;
}

// ---- full passes ----------------------------------------------------------

int PassResult::ligand_updates() const {
  int n = 0;
  for (const CycleRecord &c: cycles)
    n += static_cast<int>(c.trace.blocks.size());
  return n;
}

PassResult run_pass(const ParamSet &p, const NetConfig &cfg,
                    const ComplexGraph &graph, const PassOptions &opts) {
  cfg.validate();
  const int n_cycles = opts.n_cycles > 0 ? opts.n_cycles : cfg.n_cycles;
  if (opts.grad_cycle < 0 || opts.grad_cycle > n_cycles)
    throw std::invalid_argument("run_pass: grad_cycle out of range");
  const int last = opts.grad_cycle > 0 ? opts.grad_cycle : n_cycles;

  PassResult res;
  if (opts.init_coords) {
    if (opts.init_coords->size() != graph.coords.size())
      throw ShapeError("run_pass: init_coords size mismatch");
    res.coords = *opts.init_coords;
  } else {
    res.coords =
        init_ligand_coords(graph, mix_seed(opts.seed, 0), cfg.init_sigma).coords;
  }

  std::vector<bool> updatable(graph.num_nodes, false);
  for (int i = 0; i < graph.num_ligand; ++i)
    updatable[i] = true;
  for (int i: opts.extra_updatable)
    updatable.at(i) = true;

  std::optional<Carry> carry;
  const ParamSet *last_params = &p;
  for (int c = 1; c <= last; ++c) {
    CycleRecord rec;
    rec.sub = sample_subgraph(graph, cfg.max_nodes, mix_seed(opts.seed, c),
                              opts.extra_core);
    const int64_t n = rec.sub.graph.num_nodes;
    std::vector<double> x0(n * 3), mask(n);
    for (int64_t a = 0; a < n; ++a) {
      const int64_t parent = rec.sub.parent[a];
      std::copy_n(res.coords.data() + parent * 3, 3, x0.data() + a * 3);
      mask[a] = updatable[parent] ? 1.0 : 0.0;
    }
    const bool grad =
        c == opts.grad_cycle && opts.grad_params != nullptr;
    last_params = grad ? opts.grad_params : &p;
    rec.trace = forward_cycle(*last_params, cfg, rec.sub,
                              Tensor({ n, 3 }, std::move(x0)), mask,
                              carry ? &*carry : nullptr, opts.block);

    const auto xs = rec.trace.last().x.data();
    for (int64_t a = 0; a < n; ++a) {
      const int64_t parent = rec.sub.parent[a];
      if (updatable[parent])
        std::copy_n(xs.data() + a * 3, 3, res.coords.data() + parent * 3);
    }
    carry = make_carry(rec.trace, rec.sub);
    res.cycles.push_back(std::move(rec));
  }
  res.heads = apply_heads(*last_params, cfg, res.cycles.back().trace.last());
  return res;
}

std::vector<double> ligand_coords_angstrom(const ComplexGraph &graph,
                                           std::span<const double> coords) {
  std::vector<double> out(graph.num_ligand * 3);
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = coords[k] / kCoordScale;
  return out;
}

int medoid(const std::vector<std::vector<double>> &poses,
           const EquivalentIndexSet &eqset) {
  const int m = static_cast<int>(poses.size());
  if (m == 0)
    throw std::invalid_argument("medoid of an empty ensemble");
  std::vector<double> total(m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const double r = symmetric_rmsd(poses[a], poses[b], eqset);
      total[a] += r;
      total[b] += r;
    }
  return static_cast<int>(std::min_element(total.begin(), total.end())
                          - total.begin());
}

PredictionRecord predict(const ParamSet &p, const NetConfig &cfg,
                         const ComplexGraph &graph,
                         const EquivalentIndexSet &eqset, uint64_t seed,
                         int n_ens) {
  if (n_ens <= 0)
    n_ens = cfg.n_ens;
  const ParamSet plain = p.detached();
  const std::vector<double> ref =
      ligand_coords_angstrom(graph, graph.ligand_ref);

  PredictionRecord out;
  std::vector<std::vector<double>> traces;
  double aff = 0, prob = 0;
  for (int m = 0; m < n_ens; ++m) {
    PassOptions opts;
    opts.seed = mix_seed(seed, 1000 + m);
    const PassResult res = run_pass(plain, cfg, graph, opts);
    out.members.push_back(ligand_coords_angstrom(graph, res.coords));
    aff += res.heads.affinity.item() / kCoordScale;
    prob += res.heads.probability.item();

    std::vector<double> trace;
    for (const CycleRecord &c: res.cycles)
      for (const BlockState &s: c.trace.blocks)
        trace.push_back(symmetric_rmsd(
            ligand_coords_angstrom(c.sub.graph, s.x.data()), ref, eqset));
    traces.push_back(std::move(trace));
  }
  out.member = medoid(out.members, eqset);
  out.coords = out.members[out.member];
  out.rmsd_trace = traces[out.member];
  out.affinity = aff / n_ens;
  out.probability = prob / n_ens;
  out.screening_score = out.probability * out.affinity;
  return out;
}

}  // namespace ligpose
