//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ligpose/checkpoint.h"
#include "ligpose/config.h"
#include "ligpose/dataset.h"
#include "ligpose/metrics.h"
#include "ligpose/net.h"
#include "ligpose/rng.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ligpose;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsage = 2;

void require_file(const std::string &path) {
  if (!fs::is_regular_file(path))
    throw InputError("no such file: " + path);
}

RunConfig load_run_config(const std::string &path) {
  RunConfig cfg;
  if (!path.empty()) {
    require_file(path);
    apply_config(read_file(path), cfg);
  }
  return cfg;
}

void log_config(const std::string &command, const RunConfig &cfg,
                uint64_t seed) {
  json j;
  j["event"] = "config";
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = json::parse(config_to_json(cfg));
  std::cerr << j.dump() << '\n';
}

std::string manifest_dir(const std::string &manifest,
                         const std::string &data_dir) {
  if (!data_dir.empty())
    return data_dir;
  const fs::path parent = fs::path(manifest).parent_path();
  return parent.empty() ? "." : parent.string();
}

CheckpointDtype parse_dtype(const std::string &s) {
  if (s == "f32")
    return CheckpointDtype::kF32;
  if (s == "f64")
    return CheckpointDtype::kF64;
  throw InputError("checkpoint dtype must be f32 or f64");
}

LigandMol with_coords(const LigandMol &mol, const std::vector<double> &xyz) {
  LigandMol out = mol;
  std::vector<Vector3d> pos;
  for (int i = 0; i < mol.num_atoms(); ++i)
    pos.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
  out.set_positions(pos);
  return out;
}

std::vector<double> flat_coords(const LigandMol &mol) {
  std::vector<double> out;
  for (const LigandAtom &a: mol.atoms())
    out.insert(out.end(), { a.pos.x(), a.pos.y(), a.pos.z() });
  return out;
}

// ---- featurize ------------------------------------------------------------

struct FeaturizeArgs {
  std::string protein, ligand, out;
  std::optional<char> chain;
  std::string chain_str;
  double cutoff = 15.0;
  bool as_json = false;
};

int cmd_featurize(const FeaturizeArgs &a) {
  require_file(a.protein);
  require_file(a.ligand);
  PdbOptions po;
  if (!a.chain_str.empty())
    po.chain = a.chain_str[0];
  const ProteinChain protein = parse_pdb(read_file(a.protein), po);
  const LigandMol ligand = parse_sdf(read_file(a.ligand));
  const ComplexGraph g = build_graph(protein, ligand, ligand, a.cutoff);
  write_file(a.out, a.as_json ? graph_to_json(g) : serialize_graph(g));
  json j;
  j["event"] = "featurize";
  j["nodes"] = g.num_nodes;
  j["ligand_nodes"] = g.num_ligand;
  j["protein_nodes"] = g.num_protein();
  j["out"] = a.out;
  std::cout << j.dump() << '\n';
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string manifest, data_dir, config, checkpoint, resume, log, split;
  std::string unlabeled_manifest;
  std::string dtype = "f32";
  std::optional<uint64_t> seed;
  int steps = -1;
};

int cmd_train(const TrainArgs &a) {
  require_file(a.manifest);
  RunConfig cfg = load_run_config(a.config);
  const uint64_t seed = resolve_seed(a.seed, cfg);
  cfg.train.seed = seed;
  if (a.steps >= 0)
    cfg.train.max_steps = a.steps;
  const CheckpointDtype dtype = parse_dtype(a.dtype);

  std::optional<Checkpoint> resumed;
  if (!a.resume.empty()) {
    require_file(a.resume);
    resumed = load_checkpoint(a.resume);
    cfg.net = resumed->net;
  }
  cfg.net.validate();
  cfg.train.validate();
  log_config("train", cfg, seed);

  const PairManifest manifest = parse_manifest(read_file(a.manifest));
  const std::string dir = manifest_dir(a.manifest, a.data_dir);
  DatasetOptions dopts;
  dopts.split = a.split;
  dopts.cutoff = cfg.pocket_cutoff;

  std::vector<Sample> primary, unlabeled;
  if (cfg.task == "pose") {
    primary = load_labeled(dir, manifest, dopts);
  } else if (cfg.task == "screen") {
    primary = load_screen_pairs(dir, manifest, dopts);
  } else {  // self
    unlabeled = load_unlabeled(dir, manifest, dopts);
  }
  if (!a.unlabeled_manifest.empty()) {
    require_file(a.unlabeled_manifest);
    const PairManifest extra = parse_manifest(read_file(a.unlabeled_manifest));
    DatasetOptions uopts = dopts;
    uopts.split.clear();
    auto more = load_unlabeled(manifest_dir(a.unlabeled_manifest, ""), extra,
                               uopts);
    unlabeled.insert(unlabeled.end(), std::make_move_iterator(more.begin()),
                     std::make_move_iterator(more.end()));
  }
  if (primary.empty() && unlabeled.empty())
    throw InputError("manifest selects no complexes");

  ParamSet params = resumed ? resumed->params : init_params(cfg.net, seed);
  Trainer trainer(cfg.net, cfg.train, std::move(params));
  if (resumed)
    trainer.restore(resumed->step, resumed->epoch,
                    resumed->adam.value_or(AdamState {}));

  std::ofstream log_file;
  std::ostream *log = &std::cout;
  if (!a.log.empty()) {
    log_file.open(a.log, std::ios::app);
    if (!log_file)
      throw InputError("cannot open log file: " + a.log);
    log = &log_file;
  }
  trainer.fit(primary, unlabeled, [&](const StepResult &r) {
    *log << step_to_json(trainer.step(), r) << '\n';
    log->flush();
  });

  Checkpoint ckpt;
  ckpt.net = cfg.net;
  ckpt.params = trainer.params();
  ckpt.adam = trainer.adam();
  ckpt.step = trainer.step();
  ckpt.epoch = trainer.epoch();
  save_checkpoint(a.checkpoint, ckpt, dtype);
  json j;
  j["event"] = "checkpoint";
  j["path"] = a.checkpoint;
  j["step"] = ckpt.step;
  j["epoch"] = ckpt.epoch;
  std::cerr << j.dump() << '\n';
  return kOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint, protein, ligand, out, json_out, config, chain_str;
  double cutoff = 15.0;
  int n_ens = -1;
  std::optional<uint64_t> seed;
};

int cmd_predict(const PredictArgs &a) {
  require_file(a.checkpoint);
  require_file(a.protein);
  require_file(a.ligand);
  RunConfig cfg = load_run_config(a.config);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  cfg.net = ckpt.net;
  const uint64_t seed = resolve_seed(a.seed, cfg);
  log_config("predict", cfg, seed);

  PdbOptions po;
  if (!a.chain_str.empty())
    po.chain = a.chain_str[0];
  const ProteinChain protein = parse_pdb(read_file(a.protein), po);
  const LigandMol ligand = parse_sdf(read_file(a.ligand));
  const ComplexGraph g = build_graph(protein, ligand, ligand, a.cutoff);
  const EquivalentIndexSet eqset = enumerate_equivalent_indexes(ligand);
  const PredictionRecord rec =
      predict(ckpt.params, ckpt.net, g, eqset, seed, a.n_ens);

  const std::string title = fs::path(a.ligand).stem().string();
  write_file(a.out, emit_sdf(with_coords(ligand, rec.coords), title));
  json j;
  j["ligand"] = a.ligand;
  j["out"] = a.out;
  j["rmsd_trace"] = rec.rmsd_trace;
  j["affinity"] = rec.affinity;
  j["probability"] = rec.probability;
  j["screening_score"] = rec.screening_score;
  j["member"] = rec.member;
  j["n_ens"] = rec.members.size();
  if (a.json_out.empty())
    std::cout << j.dump() << '\n';
  else
    write_file(a.json_out, j.dump() + "\n");
  return kOk;
}

// ---- screen ---------------------------------------------------------------

struct ScreenArgs {
  std::string checkpoint, manifest, data_dir, split, out, report, config;
  int n_ens = 1;
  std::optional<uint64_t> seed;
};

const std::vector<double> kAlphas { 0.01, 0.05, 0.10 };

json panel_report(const std::vector<ScreenPanel> &panels) {
  json j;
  json ef = json::object(), succ = json::object();
  for (double alpha: kAlphas) {
    char key[16];
    std::snprintf(key, sizeof(key), "%.2f", alpha);
    double sum = 0;
    int counted = 0;
    for (const ScreenPanel &p: panels) {
      if (std::none_of(p.candidates.begin(), p.candidates.end(),
                       [](const Candidate &c) { return c.true_binder; }))
        continue;
      sum += enrichment_factor(p, alpha);
      ++counted;
    }
    ef[key] = counted ? sum / counted : 0.0;
    succ[key] = screening_success(panels, alpha);
  }
  j["ef"] = ef;
  j["screening_success"] = succ;
  j["targets"] = panels.size();
  return j;
}

int cmd_screen(const ScreenArgs &a) {
  require_file(a.checkpoint);
  require_file(a.manifest);
  RunConfig cfg = load_run_config(a.config);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  cfg.net = ckpt.net;
  const uint64_t seed = resolve_seed(a.seed, cfg);
  log_config("screen", cfg, seed);

  const PairManifest manifest = parse_manifest(read_file(a.manifest));
  const std::string dir = manifest_dir(a.manifest, a.data_dir);
  const auto pairs = label_screening_pairs(manifest, a.split);
  if (pairs.empty())
    throw InputError("screening panel is empty");

  std::map<int, ComplexFiles> cache;
  auto files = [&](int k) -> const ComplexFiles & {
    auto it = cache.find(k);
    if (it == cache.end())
      it = cache.emplace(k, load_complex(dir, manifest[k].complex_id)).first;
    return it->second;
  };

  std::map<int, ScreenPanel> panels;
  std::map<int, std::map<std::string, std::pair<double, double>>> extras;
  for (const ScreenPair &pair: pairs) {
    const ComplexFiles &prot = files(pair.protein);
    const ComplexFiles &lig = files(pair.ligand);
    const ComplexGraph g =
        build_graph(prot.protein, prot.ligand, lig.ligand, cfg.pocket_cutoff);
    const PredictionRecord rec =
        predict(ckpt.params, ckpt.net, g,
                enumerate_equivalent_indexes(lig.ligand),
                mix_seed(seed, static_cast<uint64_t>(pair.protein) * 7919
                                   + pair.ligand),
                a.n_ens);
    ScreenPanel &panel = panels[pair.protein];
    panel.target = manifest[pair.protein].complex_id;
    Candidate c;
    c.id = manifest[pair.ligand].complex_id;
    c.score = rec.screening_score;
    c.true_binder = pair.label;
    panel.candidates.push_back(c);
    extras[pair.protein][c.id] = { rec.probability, rec.affinity };
  }

  // Best ligand: the highest-affinity true binder of each target.
  std::map<std::string, double> affinity_of;
  for (const ManifestEntry &e: manifest)
    if (e.affinity)
      affinity_of[e.complex_id] = *e.affinity;
  std::vector<ScreenPanel> panel_list;
  for (auto &[k, panel]: panels) {
    Candidate *best = nullptr;
    for (Candidate &c: panel.candidates) {
      if (!c.true_binder)
        continue;
      const double aff = affinity_of.count(c.id) ? affinity_of[c.id] : -1e300;
      if (!best || aff > (affinity_of.count(best->id) ? affinity_of[best->id]
                                                      : -1e300))
        best = &c;
    }
    if (best)
      best->best_ligand = true;
    panel_list.push_back(panel);
  }

  std::ostringstream tsv;
  tsv << "target\tcandidate\trank\tscore\tprobability\taffinity\ttrue_binder\n";
  tsv.precision(10);
  for (const ScreenPanel &panel: panel_list) {
    const auto &ex = extras[std::find_if(panels.begin(), panels.end(),
                                         [&](const auto &kv) {
                                           return kv.second.target
                                                  == panel.target;
                                         })->first];
    int rank = 0;
    for (const Candidate &c: rank_candidates(panel)) {
      const auto &[prob, aff] = ex.at(c.id);
      tsv << panel.target << '\t' << c.id << '\t' << ++rank << '\t' << c.score
          << '\t' << prob << '\t' << aff << '\t' << (c.true_binder ? 1 : 0)
          << '\n';
    }
  }
  if (a.out.empty())
    std::cout << tsv.str();
  else
    write_file(a.out, tsv.str());

  json report = panel_report(panel_list);
  report["event"] = "screen_report";
  if (a.report.empty())
    std::cerr << report.dump() << '\n';
  else
    write_file(a.report, report.dump() + "\n");
  return kOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string pred_dir, native_dir, manifest, screen_tsv, out;
  bool dump_automorphisms = false;
};

std::optional<std::string> find_prediction(const std::string &dir,
                                           const std::string &id) {
  for (const std::string &name:
       { id + "_pred.sdf", id + "_ligand.sdf", id + ".sdf" }) {
    const fs::path p = fs::path(dir) / name;
    if (fs::is_regular_file(p))
      return p.string();
  }
  return std::nullopt;
}

std::vector<ScreenPanel> read_screen_tsv(const std::string &path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::map<std::string, ScreenPanel> panels;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::string target, cand, rank, score, prob, aff, binder;
    std::getline(row, target, '\t');
    std::getline(row, cand, '\t');
    std::getline(row, rank, '\t');
    std::getline(row, score, '\t');
    std::getline(row, prob, '\t');
    std::getline(row, aff, '\t');
    std::getline(row, binder, '\t');
    if (binder.empty())
      throw ParseError("bad screening row: " + line);
    Candidate c;
    c.id = cand;
    c.score = std::stod(score);
    c.true_binder = binder == "1";
    panels[target].target = target;
    panels[target].candidates.push_back(c);
  }
  std::vector<ScreenPanel> out;
  for (auto &[k, p]: panels)
    out.push_back(std::move(p));
  return out;
}

int cmd_evaluate(const EvaluateArgs &a) {
  if (!fs::is_directory(a.native_dir))
    throw InputError("no such directory: " + a.native_dir);
  std::vector<std::string> ids;
  if (!a.manifest.empty()) {
    require_file(a.manifest);
    for (const ManifestEntry &e: parse_manifest(read_file(a.manifest)))
      ids.push_back(e.complex_id);
  } else {
    for (const auto &entry: fs::directory_iterator(a.native_dir)) {
      const std::string name = entry.path().filename().string();
      const std::string suffix = "_ligand.sdf";
      if (name.size() > suffix.size()
          && name.compare(name.size() - suffix.size(), suffix.size(), suffix)
                 == 0)
        ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(ids.begin(), ids.end());
  }

  json report;
  json per = json::object();
  std::vector<double> rmsds;
  json autos = json::object();
  for (const std::string &id: ids) {
    const LigandMol native = parse_sdf(read_file(ligand_path(a.native_dir, id)));
    const EquivalentIndexSet eqset = enumerate_equivalent_indexes(native);
    if (a.dump_automorphisms)
      autos[id] = json::parse(automorphisms_to_json(eqset));
    if (a.pred_dir.empty())
      continue;
    // Without a manifest, natives lacking a prediction are skipped.
    const auto pred_path = find_prediction(a.pred_dir, id);
    if (!pred_path) {
      if (a.manifest.empty())
        continue;
      throw InputError("no prediction for " + id + " in " + a.pred_dir);
    }
    const LigandMol pred = parse_sdf(read_file(*pred_path));
    if (pred.num_atoms() != native.num_atoms())
      throw InputError("atom count mismatch for " + id);
    const double r = symmetric_rmsd(flat_coords(pred), flat_coords(native), eqset);
    per[id] = r;
    rmsds.push_back(r);
  }
  if (a.dump_automorphisms)
    report["automorphisms"] = autos;
  if (!a.pred_dir.empty()) {
    if (rmsds.empty())
      throw InputError("no complexes to evaluate");
    report["rmsd"] = per;
    report["success@2"] = success_rate(rmsds, 2.0);
    report["success@4"] = success_rate(rmsds, 4.0);
    double mean = 0;
    for (double r: rmsds)
      mean += r / rmsds.size();
    report["mean_rmsd"] = mean;
  }
  if (!a.screen_tsv.empty()) {
    require_file(a.screen_tsv);
    const json sr = panel_report(read_screen_tsv(a.screen_tsv));
    report["ef"] = sr["ef"];
    report["screening_success"] = sr["screening_success"];
  }
  const std::string text = report.dump() + "\n";
  if (a.out.empty())
    std::cout << text;
  else
    write_file(a.out, text);
  return kOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int count = 8;
  uint64_t seed = 0;
  std::string prefix = "toy";
  std::string split = "train";
  SynthOptions opts;
};

int cmd_synth(const SynthArgs &a) {
  if (a.count < 1)
    throw InputError("--count must be positive");
  if (a.opts.min_ligand_atoms < 1 || a.opts.max_ligand_atoms < a.opts.min_ligand_atoms
      || a.opts.num_residues < 1 || a.opts.max_pocket_atoms < 1)
    throw InputError("invalid synthetic size options");
  write_synth_dataset(a.out, synth_dataset(a.count, a.seed, a.opts, a.prefix),
                      a.split);
  json j;
  j["event"] = "synth";
  j["count"] = a.count;
  j["dir"] = a.out;
  std::cout << j.dump() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "LigPose: protein-ligand pose, affinity and screening" };
  app.require_subcommand(1);

  FeaturizeArgs fa;
  auto *feat = app.add_subcommand("featurize", "Build a complex graph file");
  feat->add_option("--protein", fa.protein, "Protein PDB")->required();
  feat->add_option("--ligand", fa.ligand, "Ligand SDF")->required();
  feat->add_option("--cutoff", fa.cutoff, "Pocket cutoff (angstrom)");
  feat->add_option("--chain", fa.chain_str, "Protein chain id");
  feat->add_option("--out", fa.out, "Output path")->required();
  feat->add_flag("--json", fa.as_json, "Write the JSON debug form");

  TrainArgs ta;
  auto *train = app.add_subcommand("train", "Train a model");
  train->add_option("--manifest", ta.manifest, "Complex manifest TSV")->required();
  train->add_option("--data-dir", ta.data_dir, "Complex files (default: manifest dir)");
  train->add_option("--unlabeled-manifest", ta.unlabeled_manifest,
                    "Extra complexes used for masking/denoising");
  train->add_option("--config", ta.config, "key = value config file");
  train->add_option("--checkpoint", ta.checkpoint, "Output checkpoint")->required();
  train->add_option("--resume", ta.resume, "Resume from checkpoint");
  train->add_option("--log", ta.log, "Append JSON step log here (default stdout)");
  train->add_option("--split", ta.split, "Manifest split to use (default all)");
  train->add_option("--steps", ta.steps, "Steps to run (overrides max_steps)");
  train->add_option("--seed", ta.seed, "Random seed");
  train->add_option("--checkpoint-dtype", ta.dtype, "f32 or f64")
      ->check(CLI::IsMember({ "f32", "f64" }));

  PredictArgs pa;
  auto *pred = app.add_subcommand("predict", "Predict a binding pose");
  pred->add_option("--checkpoint", pa.checkpoint, "Model checkpoint")->required();
  pred->add_option("--protein", pa.protein, "Protein PDB")->required();
  pred->add_option("--ligand", pa.ligand, "Ligand SDF (defines the site)")->required();
  pred->add_option("--out", pa.out, "Output SDF")->required();
  pred->add_option("--json", pa.json_out, "Output JSON record (default stdout)");
  pred->add_option("--config", pa.config, "key = value config file");
  pred->add_option("--cutoff", pa.cutoff, "Pocket cutoff (angstrom)");
  pred->add_option("--chain", pa.chain_str, "Protein chain id");
  pred->add_option("--n-ens", pa.n_ens, "Ensemble size (default from checkpoint)");
  pred->add_option("--seed", pa.seed, "Random seed");

  ScreenArgs sa;
  auto *screen = app.add_subcommand("screen", "Rank candidate ligands per target");
  screen->add_option("--checkpoint", sa.checkpoint, "Model checkpoint")->required();
  screen->add_option("--manifest", sa.manifest, "Complex manifest TSV")->required();
  screen->add_option("--data-dir", sa.data_dir, "Complex files (default: manifest dir)");
  screen->add_option("--split", sa.split, "Manifest split");
  screen->add_option("--out", sa.out, "Ranked TSV (default stdout)");
  screen->add_option("--report", sa.report, "EF/success JSON (default stderr)");
  screen->add_option("--config", sa.config, "key = value config file");
  screen->add_option("--n-ens", sa.n_ens, "Ensemble size per pair");
  screen->add_option("--seed", sa.seed, "Random seed");

  EvaluateArgs ea;
  auto *eval = app.add_subcommand("evaluate", "Score predictions against natives");
  eval->add_option("--pred-dir", ea.pred_dir, "Predicted ligand SDFs");
  eval->add_option("--native-dir", ea.native_dir, "Native complex files")->required();
  eval->add_option("--manifest", ea.manifest, "Restrict to manifest ids");
  eval->add_option("--screen-tsv", ea.screen_tsv, "Ranked TSV from `screen`");
  eval->add_option("--out", ea.out, "JSON report (default stdout)");
  eval->add_flag("--dump-automorphisms", ea.dump_automorphisms,
                 "Include equivalent index sets");

  SynthArgs ya;
  auto *synth = app.add_subcommand("synth", "Write a synthetic complex set");
  synth->add_option("--out", ya.out, "Output directory")->required();
  synth->add_option("--count", ya.count, "Number of complexes");
  synth->add_option("--seed", ya.seed, "Random seed");
  synth->add_option("--prefix", ya.prefix, "Complex id prefix");
  synth->add_option("--split", ya.split, "Split label");
  synth->add_option("--min-ligand-atoms", ya.opts.min_ligand_atoms, "Smallest ligand");
  synth->add_option("--max-ligand-atoms", ya.opts.max_ligand_atoms, "Largest ligand");
  synth->add_option("--residues", ya.opts.num_residues, "Pocket residues");
  synth->add_option("--max-pocket-atoms", ya.opts.max_pocket_atoms, "Pocket atom cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*feat)
      return cmd_featurize(fa);
    if (*train)
      return cmd_train(ta);
    if (*pred)
      return cmd_predict(pa);
    if (*screen)
      return cmd_screen(sa);
    if (*eval)
      return cmd_evaluate(ea);
    if (*synth)
      return cmd_synth(ya);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsage;
}
