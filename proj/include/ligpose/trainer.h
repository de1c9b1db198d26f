//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_TRAINER_H_
#define LIGPOSE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ligpose/loss.h"
#include "ligpose/net.h"

namespace ligpose {

struct TrainConfig {
  double lr = 1e-4;
  double lr_decay = 0.99;  // applied once per epoch
  int batch_size = 1;
  int epochs = 1;
  int max_steps = 0;  // 0: run `epochs` epochs
  // (first step, max_nodes) pairs; the last entry whose step has been
  // reached sets the sub-graph size. Empty: NetConfig::max_nodes.
  std::vector<std::pair<int, int>> max_nodes_stages;
  LossWeights weights;
  double mask_ratio = 0.15;
  double noise_ratio = 0.15;
  double dpr_sigma = 2.0;  // angstrom
  double labeled_fraction = 0.5;
  double clip_norm = 10.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;

  void validate() const;
};

enum class SampleKind {
  kLabeled,    // native pose (and optional affinity)
  kUnlabeled,  // masking + denoising
  kScreen,     // protein/ligand pair with a binder label
};

struct Sample {
  std::string id;
  SampleKind kind = SampleKind::kLabeled;
  ComplexGraph graph;
  EquivalentIndexSet eqset;
  std::optional<double> affinity;  // unscaled
  bool binder = false;
  bool has_pose = true;
};

// ---- self-supervised corruption -------------------------------------------

struct MaskResult {
  ComplexGraph graph;
  MaskPlan plan;
};

// Each eligible item (protein node, ligand node, covalent protein-protein
// and ligand-ligand edge) is masked with probability `ratio`; at least one
// protein node, one ligand node and two edges of each kind are masked when
// available. Masked node rows and edge covalent/bond-type channels are
// zeroed; distance channels are kept.
MaskResult apply_mask(const ComplexGraph &graph, double ratio, uint64_t seed);

struct NoiseResult {
  ComplexGraph graph;
  std::vector<int> noised;        // protein node ids
  std::vector<double> originals;  // [k*3], scaled
};

// Protein nodes are picked with probability `ratio` (at least one) and
// displaced by iid Normal(0, sigma^2) per component, sigma in angstrom.
NoiseResult apply_noise(const ComplexGraph &graph, double sigma_angstrom,
                        double ratio, uint64_t seed);

// ---- screening pairs --------------------------------------------------------

struct ManifestEntry {
  std::string complex_id;
  std::string uniprot_id;
  std::string protein_name;
  std::string ligand_code;
  std::optional<double> affinity;
  std::string split;
};

using PairManifest = std::vector<ManifestEntry>;

PairManifest parse_manifest(std::string_view tsv);
std::string format_manifest(const PairManifest &manifest);

struct ScreenPair {
  int protein = 0;  // manifest index providing the pocket
  int ligand = 0;   // manifest index providing the ligand
  bool label = false;

  bool operator==(const ScreenPair &) const = default;
};

// Every (protein, ligand) combination over entries whose split equals
// `split` (all entries when empty). Positive when some entry links to the
// protein by complex, UniProt id or protein name and to the ligand by
// complex or ligand code.
std::vector<ScreenPair> label_screening_pairs(const PairManifest &manifest,
                                              const std::string &split = "");

/// Endless 1:1 positive/negative batches drawn from labelled pairs.
class ScreenPairStream {
public:
  ScreenPairStream(const PairManifest &manifest, uint64_t seed,
                   const std::string &split = "");

  std::vector<ScreenPair> next_batch(int size);
  const std::vector<ScreenPair> &positives() const { return pos_; }
  const std::vector<ScreenPair> &negatives() const { return neg_; }

private:
  std::vector<ScreenPair> pos_, neg_;
  std::mt19937_64 rng_;
  bool next_positive_ = true;
};

// ---- optimisation ---------------------------------------------------------

struct AdamState {
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
  int64_t t = 0;
};

struct StepResult {
  double loss = 0;
  std::map<std::string, double> components;
  double lr = 0;
  double grad_norm = 0;
  std::vector<int> cycles;  // cycle drawn for each sample
};

class NonFiniteLossError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Loss of one sample on `tape`, with the chosen cycle `cycle` recorded.
// Components are added to `components`.
Tensor sample_loss(const ParamSet &params, const ParamSet &watched,
                   const NetConfig &net, const TrainConfig &train,
                   const Sample &sample, int cycle, uint64_t seed,
                   std::map<std::string, double> &components);

class Trainer {
public:
  Trainer(NetConfig net, TrainConfig train, ParamSet params);

  // One optimizer step over a batch. Throws NonFiniteLossError (leaving the
  // parameters untouched) if the loss or a gradient is not finite.
  StepResult train_step(const std::vector<const Sample *> &batch);

  // Runs until `max_steps` (or `epochs` epochs of the labelled pool when
  // max_steps is 0). Labelled and unlabelled samples alternate at random
  // by `labeled_fraction`; `log` sees every step.
  void fit(const std::vector<Sample> &labeled,
           const std::vector<Sample> &unlabeled,
           const std::function<void(const StepResult &)> &log = {});

  void end_epoch();
  double learning_rate() const;

  const ParamSet &params() const { return params_; }
  ParamSet &params() { return params_; }
  const NetConfig &net_config() const { return net_; }
  const TrainConfig &train_config() const { return train_; }
  AdamState &adam() { return adam_; }
  const AdamState &adam() const { return adam_; }
  int64_t step() const { return step_; }
  int epoch() const { return epoch_; }
  void restore(int64_t step, int epoch, AdamState adam);

  // The cycle drawn for the next sample (exposed for distribution checks).
  int draw_cycle(std::mt19937_64 &rng) const;

private:
  NetConfig net_;
  TrainConfig train_;
  ParamSet params_;
  AdamState adam_;
  int64_t step_ = 0;
  int epoch_ = 0;
};

std::string step_to_json(int64_t step, const StepResult &r);

}  // namespace ligpose

#endif  // LIGPOSE_TRAINER_H_
