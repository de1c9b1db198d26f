//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/trainer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ligpose/ops.h"
#include "ligpose/rng.h"

namespace ligpose {

using namespace ad;

void TrainConfig::validate() const {
  if (!(lr > 0) || !(lr_decay > 0 && lr_decay <= 1))
    throw InputError("lr must be positive and lr_decay in (0, 1]");
  if (batch_size < 1 || epochs < 0 || max_steps < 0)
    throw InputError("batch_size must be >= 1; epochs, max_steps >= 0");
  for (double r: { mask_ratio, noise_ratio, labeled_fraction })
    if (!(r >= 0 && r <= 1))
      throw InputError("ratios must lie in [0, 1]");
  if (!(dpr_sigma >= 0) || !(clip_norm > 0))
    throw InputError("dpr_sigma must be >= 0 and clip_norm > 0");
  if (weights.gamma1 < 0 || weights.gamma2 < 0 || weights.gamma3 < 0)
    throw InputError("loss weights must be non-negative");
}

// ---- corruption -----------------------------------------------------------

namespace {

// Bernoulli(ratio) selection topped up at random to `minimum` items.
template <class T>
std::vector<T> select_items(const std::vector<T> &items, double ratio,
                            size_t minimum, std::mt19937_64 &rng) {
  std::bernoulli_distribution pick(ratio);
  std::vector<bool> chosen(items.size());
  size_t count = 0;
  for (size_t k = 0; k < items.size(); ++k)
    if (pick(rng)) {
      chosen[k] = true;
      ++count;
    }
  minimum = std::min(minimum, items.size());
  while (count < minimum) {
    std::uniform_int_distribution<size_t> u(0, items.size() - 1);
    const size_t k = u(rng);
    if (!chosen[k]) {
      chosen[k] = true;
      ++count;
    }
  }
  std::vector<T> out;
  for (size_t k = 0; k < items.size(); ++k)
    if (chosen[k])
      out.push_back(items[k]);
  return out;
}

void clear_bond(ComplexGraph &g, int i, int j) {
  for (auto [a, b]: { std::pair { i, j }, std::pair { j, i } }) {
    double *e = g.edge(a, b);
    e[edge_feat::kCovalent] = 0.0;
    std::fill_n(e + edge_feat::kBondType, edge_feat::kNumBondTypes, 0.0);
  }
}

}  // namespace

MaskResult apply_mask(const ComplexGraph &graph, double ratio, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> prot, lig;
  std::vector<std::pair<int, int>> prot_edges, lig_edges;
  for (int i = 0; i < graph.num_nodes; ++i)
    (i < graph.num_ligand ? lig : prot).push_back(i);
  for (int i = 0; i < graph.num_nodes; ++i)
    for (int j = i + 1; j < graph.num_nodes; ++j) {
      if (graph.edge(i, j)[edge_feat::kCovalent] == 0.0)
        continue;
      const bool li = i < graph.num_ligand, lj = j < graph.num_ligand;
      if (li && lj)
        lig_edges.emplace_back(i, j);
      else if (!li && !lj)
        prot_edges.emplace_back(i, j);
    }

  MaskResult out;
  MaskPlan &plan = out.plan;
  plan.protein_nodes = select_items(prot, ratio, 1, rng);
  plan.ligand_nodes = select_items(lig, ratio, 1, rng);
  plan.protein_edges = select_items(prot_edges, ratio, 2, rng);
  plan.ligand_edges = select_items(lig_edges, ratio, 2, rng);
  for (int i: plan.protein_nodes) {
    plan.atom_targets.push_back(graph.protein_atom_class(i));
    plan.residue_targets.push_back(graph.protein_residue_class(i));
  }
  for (int i: plan.ligand_nodes)
    plan.element_targets.push_back(graph.ligand_element_class(i));
  for (const auto *edges: { &plan.protein_edges, &plan.ligand_edges })
    for (auto [i, j]: *edges)
      plan.bond_targets.push_back(graph.bond_type_class(i, j));

  out.graph = graph;
  for (const auto *nodes: { &plan.protein_nodes, &plan.ligand_nodes })
    for (int i: *nodes)
      std::fill_n(out.graph.node_row(i), kNodeFeatDim, 0.0);
  for (const auto *edges: { &plan.protein_edges, &plan.ligand_edges })
    for (auto [i, j]: *edges)
      clear_bond(out.graph, i, j);
  return out;
}

NoiseResult apply_noise(const ComplexGraph &graph, double sigma_angstrom,
                        double ratio, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> prot;
  for (int i = graph.num_ligand; i < graph.num_nodes; ++i)
    prot.push_back(i);
  NoiseResult out;
  out.graph = graph;
  out.noised = select_items(prot, ratio, 1, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = sigma_angstrom * kCoordScale;
  for (int i: out.noised)
    for (int k = 0; k < 3; ++k) {
      double &x = out.graph.coords[i * 3 + k];
      out.originals.push_back(x);
      x += sigma * normal(rng);
    }
  out.graph.refresh_distance_channel(out.noised);
  return out;
}

// ---- manifest and pairs ---------------------------------------------------

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos)
      return out;
    start = tab + 1;
  }
}

const std::vector<std::string> kManifestHeader {
  "complex_id", "uniprot_id", "protein_name", "ligand_code", "affinity", "split"
};

}  // namespace

PairManifest parse_manifest(std::string_view tsv) {
  PairManifest out;
  std::istringstream in { std::string(tsv) };
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    auto fields = split_tabs(line);
    if (!header) {
      if (fields != kManifestHeader)
        throw ParseError("manifest header must be: complex_id uniprot_id "
                         "protein_name ligand_code affinity split (tabs)");
      header = true;
      continue;
    }
    if (fields.size() != kManifestHeader.size())
      throw ParseError("manifest line " + std::to_string(lineno) + ": expected "
                       + std::to_string(kManifestHeader.size()) + " fields");
    ManifestEntry e;
    e.complex_id = fields[0];
    e.uniprot_id = fields[1];
    e.protein_name = fields[2];
    e.ligand_code = fields[3];
    if (!fields[4].empty() && fields[4] != "NA") {
      try {
        size_t used = 0;
        e.affinity = std::stod(fields[4], &used);
        if (used != fields[4].size())
          throw std::invalid_argument("trailing");
      } catch (const std::exception &) {
        throw ParseError("manifest line " + std::to_string(lineno)
                         + ": bad affinity '" + fields[4] + "'");
      }
    }
    e.split = fields[5];
    if (e.complex_id.empty())
      throw ParseError("manifest line " + std::to_string(lineno)
                       + ": empty complex_id");
    out.push_back(std::move(e));
  }
  if (!header)
    throw ParseError("manifest is empty");
  return out;
}

std::string format_manifest(const PairManifest &manifest) {
  std::ostringstream out;
  for (size_t k = 0; k < kManifestHeader.size(); ++k)
    out << (k ? "\t" : "") << kManifestHeader[k];
  out << '\n';
  for (const ManifestEntry &e: manifest) {
    out << e.complex_id << '\t' << e.uniprot_id << '\t' << e.protein_name
        << '\t' << e.ligand_code << '\t';
    if (e.affinity) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), *e.affinity);
      out << std::string_view(buf, res.ptr);
    } else {
      out << "NA";
    }
    out << '\t' << e.split << '\n';
  }
  return out.str();
}

std::vector<ScreenPair> label_screening_pairs(const PairManifest &manifest,
                                              const std::string &split) {
  std::vector<int> used;
  for (size_t k = 0; k < manifest.size(); ++k)
    if (split.empty() || manifest[k].split == split)
      used.push_back(static_cast<int>(k));

  auto protein_linked = [&](int a, int c) {
    const ManifestEntry &x = manifest[a], &y = manifest[c];
    return a == c || (!x.uniprot_id.empty() && x.uniprot_id == y.uniprot_id)
           || (!x.protein_name.empty() && x.protein_name == y.protein_name);
  };
  auto ligand_linked = [&](int b, int c) {
    const ManifestEntry &x = manifest[b], &y = manifest[c];
    return b == c || (!x.ligand_code.empty() && x.ligand_code == y.ligand_code);
  };

  std::vector<ScreenPair> out;
  for (int a: used)
    for (int b: used) {
      bool positive = false;
      for (int c: used)
        if (protein_linked(a, c) && ligand_linked(b, c)) {
          positive = true;
          break;
        }
      out.push_back({ a, b, positive });
    }
  return out;
}

ScreenPairStream::ScreenPairStream(const PairManifest &manifest, uint64_t seed,
                                   const std::string &split)
    : rng_(seed) {
  for (const ScreenPair &p: label_screening_pairs(manifest, split))
    (p.label ? pos_ : neg_).push_back(p);
  if (pos_.empty())
    throw InputError("screening manifest yields no positive pairs");
  if (neg_.empty())
    throw InputError("screening manifest yields no negative pairs");
}

std::vector<ScreenPair> ScreenPairStream::next_batch(int size) {
  std::vector<ScreenPair> out;
  for (int k = 0; k < size; ++k) {
    const auto &pool = next_positive_ ? pos_ : neg_;
    std::uniform_int_distribution<size_t> u(0, pool.size() - 1);
    out.push_back(pool[u(rng_)]);
    next_positive_ = !next_positive_;
  }
  return out;
}

// ---- training -------------------------------------------------------------

Tensor sample_loss(const ParamSet &params, const ParamSet &watched,
                   const NetConfig &net, const TrainConfig &train,
                   const Sample &sample, int cycle, uint64_t seed,
                   std::map<std::string, double> &components) {
  PassOptions opts;
  opts.seed = seed;
  opts.grad_cycle = cycle;
  opts.grad_params = &watched;

  if (sample.kind == SampleKind::kUnlabeled) {
    const MaskResult masked =
        apply_mask(sample.graph, train.mask_ratio, mix_seed(seed, 101));
    const NoiseResult noised = apply_noise(masked.graph, train.dpr_sigma,
                                           train.noise_ratio,
                                           mix_seed(seed, 102));
    opts.extra_core = masked.plan.nodes();
    opts.extra_core.insert(opts.extra_core.end(), noised.noised.begin(),
                           noised.noised.end());
    opts.extra_updatable = noised.noised;
    const PassResult res = run_pass(params, net, noised.graph, opts);
    const CycleRecord &rec = res.cycles.back();
    const McmOutput mcm =
        mcm_loss(watched, rec.trace.last(), rec.sub, masked.plan);
    std::vector<int64_t> rows;
    for (int id: noised.noised) {
      auto it = std::find(rec.sub.parent.begin(), rec.sub.parent.end(), id);
      rows.push_back(it - rec.sub.parent.begin());
    }
    const Tensor dpr = dpr_loss(rec.trace.last().x, rows, noised.originals);
    components["mcm"] += mcm.total.item();
    components["mcm_atom"] += mcm.atom.item();
    components["mcm_residue"] += mcm.residue.item();
    components["mcm_element"] += mcm.element.item();
    components["mcm_bond"] += mcm.bond.item();
    components["dpr"] += dpr.item();
    return self_loss(mcm.total, dpr);
  }

  const PassResult res = run_pass(params, net, sample.graph, opts);
  const BlockTrace &trace = res.cycles.back().trace;
  Tensor total = Tensor::scalar(0.0);
  if (sample.has_pose) {
    std::optional<double> target;
    if (sample.affinity)
      target = *sample.affinity * kCoordScale;
    total = supervised_loss(trace, sample.graph.num_ligand,
                            sample.graph.ligand_ref, sample.eqset,
                            &res.heads.affinity, target, train.weights);
    components["supervised"] += total.item();
    const Tensor lig = slice(trace.last().x, 0, 0, sample.graph.num_ligand);
    components["coord_final"] +=
        sym_loss(lig, sample.graph.ligand_ref, sample.eqset).value.item()
        / kCoordScale;
  }
  if (sample.kind == SampleKind::kScreen) {
    const Tensor focal = binary_focal_loss(res.heads.bind_logit, sample.binder);
    components["screen"] += focal.item();
    total = add(total, scale(focal, train.weights.gamma3));
  }
  return total;
}

Trainer::Trainer(NetConfig net, TrainConfig train, ParamSet params)
    : net_(net), train_(std::move(train)), params_(params.detached()) {
  net_.validate();
  train_.validate();
}

double Trainer::learning_rate() const {
  return train_.lr * std::pow(train_.lr_decay, epoch_);
}

void Trainer::end_epoch() { ++epoch_; }

void Trainer::restore(int64_t step, int epoch, AdamState adam) {
  step_ = step;
  epoch_ = epoch;
  adam_ = std::move(adam);
}

int Trainer::draw_cycle(std::mt19937_64 &rng) const {
  std::uniform_int_distribution<int> u(1, net_.n_cycles);
  return u(rng);
}

StepResult Trainer::train_step(const std::vector<const Sample *> &batch) {
  if (batch.empty())
    throw std::invalid_argument("train_step: empty batch");
  NetConfig net = net_;
  for (auto [from, nodes]: train_.max_nodes_stages)
    if (step_ >= from)
      net.max_nodes = nodes;

  std::mt19937_64 rng(mix_seed(train_.seed, static_cast<uint64_t>(step_)));
  StepResult result;
  result.lr = learning_rate();
  std::map<std::string, std::vector<double>> grads;
  for (const auto &[name, t]: params_.tensors())
    grads[name].assign(t.size(), 0.0);

  for (const Sample *sample: batch) {
    const int cycle = draw_cycle(rng);
    const uint64_t seed = rng();
    result.cycles.push_back(cycle);
    Tape tape;
    const ParamSet watched = params_.watched(tape);
    const Tensor loss = sample_loss(params_, watched, net, train_, *sample,
                                    cycle, seed, result.components);
    const double value = loss.item();
    if (!std::isfinite(value))
      throw NonFiniteLossError("non-finite loss on sample '" + sample->id
                               + "' at step " + std::to_string(step_)
                               + " (cycle " + std::to_string(cycle) + ")");
    result.loss += value;
    if (loss.requires_grad()) {
      tape.backward(loss);
      for (const auto &[name, t]: watched.tensors()) {
        const auto g = tape.grad(t);
        auto &acc = grads[name];
        for (size_t k = 0; k < g.size(); ++k)
          acc[k] += g[k];
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  result.loss *= inv;
  for (auto &[_, v]: result.components)
    v *= inv;
  double norm2 = 0;
  for (auto &[name, g]: grads)
    for (double &x: g) {
      x *= inv;
      norm2 += x * x;
    }
  result.grad_norm = std::sqrt(norm2);
  if (!std::isfinite(result.grad_norm))
    throw NonFiniteLossError("non-finite gradient at step "
                             + std::to_string(step_));
  const double clip = result.grad_norm > train_.clip_norm
                          ? train_.clip_norm / result.grad_norm
                          : 1.0;

  ++adam_.t;
  const double b1 = train_.adam_beta1, b2 = train_.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_.t));
  for (auto &[name, t]: params_.tensors()) {
    const auto &g = grads[name];
    auto &m = adam_.m[name];
    auto &v = adam_.v[name];
    m.resize(g.size(), 0.0);
    v.resize(g.size(), 0.0);
    auto w = t.mutable_data();
    for (size_t k = 0; k < g.size(); ++k) {
      const double gk = g[k] * clip;
      m[k] = b1 * m[k] + (1 - b1) * gk;
      v[k] = b2 * v[k] + (1 - b2) * gk * gk;
      w[k] -= result.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + train_.adam_eps);
    }
  }
  ++step_;
  return result;
}

namespace {

/// Shuffled cycling over sample indexes; screening samples are drawn
/// alternately from binders and non-binders.
class Pool {
public:
  Pool(const std::vector<Sample> &samples, std::mt19937_64 &rng)
      : samples_(samples), rng_(rng) {
    for (size_t k = 0; k < samples.size(); ++k) {
      if (samples[k].kind == SampleKind::kScreen && !samples[k].binder)
        neg_.ids.push_back(k);
      else
        pos_.ids.push_back(k);
    }
    balanced_ = !neg_.ids.empty() && !pos_.ids.empty();
    if (!balanced_ && pos_.ids.empty())
      std::swap(pos_, neg_);
    shuffle(pos_);
    shuffle(neg_);
  }

  bool empty() const { return samples_.empty(); }

  // Returns the next sample; `wrapped` is set when the primary order
  // restarts (one epoch consumed).
  const Sample *next(bool &wrapped) {
    Order &o = balanced_ && !take_pos_ ? neg_ : pos_;
    take_pos_ = !take_pos_;
    if (o.cursor == o.ids.size()) {
      shuffle(o);
      if (&o == &pos_)
        wrapped = true;
    }
    return &samples_[o.ids[o.cursor++]];
  }

private:
  struct Order {
    std::vector<size_t> ids;
    size_t cursor = 0;
  };

  void shuffle(Order &o) {
    std::shuffle(o.ids.begin(), o.ids.end(), rng_);
    o.cursor = 0;
  }

  const std::vector<Sample> &samples_;
  std::mt19937_64 &rng_;
  Order pos_, neg_;
  bool balanced_ = false;
  bool take_pos_ = true;
};

}  // namespace

void Trainer::fit(const std::vector<Sample> &labeled,
                  const std::vector<Sample> &unlabeled,
                  const std::function<void(const StepResult &)> &log) {
  if (labeled.empty() && unlabeled.empty())
    throw InputError("no training samples");
  std::mt19937_64 rng(mix_seed(train_.seed ^ 0x5eed, static_cast<uint64_t>(step_)));
  Pool lab(labeled, rng), unl(unlabeled, rng);
  Pool &primary = lab.empty() ? unl : lab;
  const size_t primary_size = lab.empty() ? unlabeled.size() : labeled.size();
  const int64_t steps =
      train_.max_steps > 0
          ? train_.max_steps
          : train_.epochs
                * static_cast<int64_t>((primary_size + train_.batch_size - 1)
                                       / train_.batch_size);
  std::bernoulli_distribution pick_labeled(train_.labeled_fraction);

  for (int64_t s = 0; s < steps; ++s) {
    Pool *pool = &primary;
    if (!lab.empty() && !unl.empty())
      pool = pick_labeled(rng) ? &lab : &unl;
    std::vector<const Sample *> batch;
    bool wrapped = false;
    for (int k = 0; k < train_.batch_size; ++k) {
      bool w = false;
      batch.push_back(pool->next(w));
      wrapped = wrapped || (w && pool == &primary);
    }
    if (wrapped)
      end_epoch();
    try {
      const StepResult r = train_step(batch);
      if (log)
        log(r);
    } catch (const NonFiniteLossError &e) {
      std::cerr << "skipping step: " << e.what() << '\n';
      ++step_;
    }
  }
}

std::string step_to_json(int64_t step, const StepResult &r) {
  nlohmann::json j;
  j["step"] = step;
  j["loss"] = r.loss;
  for (const auto &[k, v]: r.components)
    j[k] = v;
  j["lr"] = r.lr;
  j["grad_norm"] = r.grad_norm;
  j["cycles"] = r.cycles;
  return j.dump();
}

}  // namespace ligpose
