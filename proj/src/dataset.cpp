//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/dataset.h"

#include <filesystem>
#include <map>

#include "ligpose/checkpoint.h"

namespace ligpose {

std::string protein_path(const std::string &dir, const std::string &id) {
  return (std::filesystem::path(dir) / (id + "_protein.pdb")).string();
}

std::string ligand_path(const std::string &dir, const std::string &id) {
  return (std::filesystem::path(dir) / (id + "_ligand.sdf")).string();
}

ComplexFiles load_complex(const std::string &dir, const std::string &id) {
  ComplexFiles out;
  out.protein = parse_pdb(read_file(protein_path(dir, id)));
  out.ligand = parse_sdf(read_file(ligand_path(dir, id)));
  return out;
}

ComplexGraph build_graph(const ProteinChain &protein, const LigandMol &site,
                         const LigandMol &ligand, double cutoff) {
  return featurize(select_pocket(protein, site, cutoff), ligand);
}

namespace {

bool in_split(const ManifestEntry &e, const DatasetOptions &opts) {
  return opts.split.empty() || e.split == opts.split;
}

Sample sample_from(const std::string &id, const ComplexFiles &files,
                   SampleKind kind, std::optional<double> affinity,
                   const DatasetOptions &opts) {
  Sample s;
  s.id = id;
  s.kind = kind;
  s.graph = build_graph(files.protein, files.ligand, files.ligand, opts.cutoff);
  s.eqset = enumerate_equivalent_indexes(files.ligand, opts.automorphism_cap);
  s.affinity = affinity;
  s.binder = true;
  return s;
}

}  // namespace

std::vector<Sample> load_labeled(const std::string &dir,
                                 const PairManifest &manifest,
                                 const DatasetOptions &opts) {
  std::vector<Sample> out;
  for (const ManifestEntry &e: manifest)
    if (in_split(e, opts))
      out.push_back(sample_from(e.complex_id, load_complex(dir, e.complex_id),
                                SampleKind::kLabeled, e.affinity, opts));
  return out;
}

std::vector<Sample> load_unlabeled(const std::string &dir,
                                   const PairManifest &manifest,
                                   const DatasetOptions &opts) {
  std::vector<Sample> out;
  for (const ManifestEntry &e: manifest)
    if (in_split(e, opts)) {
      Sample s = sample_from(e.complex_id, load_complex(dir, e.complex_id),
                             SampleKind::kUnlabeled, std::nullopt, opts);
      s.has_pose = false;
      out.push_back(std::move(s));
    }
  return out;
}

std::vector<Sample> load_screen_pairs(const std::string &dir,
                                      const PairManifest &manifest,
                                      const DatasetOptions &opts) {
  std::map<int, ComplexFiles> cache;
  auto files = [&](int k) -> const ComplexFiles & {
    auto it = cache.find(k);
    if (it == cache.end())
      it = cache.emplace(k, load_complex(dir, manifest[k].complex_id)).first;
    return it->second;
  };
  std::vector<Sample> out;
  for (const ScreenPair &pair: label_screening_pairs(manifest, opts.split)) {
    const ComplexFiles &prot = files(pair.protein);
    const ComplexFiles &lig = files(pair.ligand);
    Sample s;
    s.id = manifest[pair.protein].complex_id + ":"
           + manifest[pair.ligand].complex_id;
    s.kind = SampleKind::kScreen;
    s.graph = build_graph(prot.protein, prot.ligand, lig.ligand, opts.cutoff);
    s.eqset = enumerate_equivalent_indexes(lig.ligand, opts.automorphism_cap);
    s.binder = pair.label;
    // The native pose is known only for a ligand in its own complex.
    s.has_pose = pair.protein == pair.ligand;
    if (s.has_pose)
      s.affinity = manifest[pair.ligand].affinity;
    out.push_back(std::move(s));
  }
  return out;
}

Sample make_sample(const SynthComplex &c, SampleKind kind, double cutoff) {
  DatasetOptions opts;
  opts.cutoff = cutoff;
  Sample s = sample_from(c.id, ComplexFiles { c.protein, c.ligand }, kind,
                         kind == SampleKind::kUnlabeled
                             ? std::nullopt
                             : std::optional<double>(c.affinity),
                         opts);
  s.has_pose = kind != SampleKind::kUnlabeled;
  return s;
}

void write_synth_dataset(const std::string &dir,
                         const std::vector<SynthComplex> &complexes,
                         const std::string &split) {
  std::filesystem::create_directories(dir);
  PairManifest manifest;
  for (const SynthComplex &c: complexes) {
    write_file(protein_path(dir, c.id), emit_pdb(c.protein));
    write_file(ligand_path(dir, c.id), emit_sdf(c.ligand, c.id));
    ManifestEntry e;
    e.complex_id = c.id;
    e.uniprot_id = "SYN" + c.id;
    e.protein_name = "synthetic " + c.id;
    e.ligand_code = "L" + c.id;
    e.affinity = std::round(c.affinity * 1000) / 1000;
    e.split = split;
    manifest.push_back(std::move(e));
  }
  write_file((std::filesystem::path(dir) / "manifest.tsv").string(),
             format_manifest(manifest));
}

}  // namespace ligpose
