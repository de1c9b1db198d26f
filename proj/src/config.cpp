//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "ligpose/config.h"

#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace ligpose {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int to_int(const std::string &key, const std::string &v) {
  size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw InputError("config key '" + key + "': expected an integer, got '" + v
                     + "'");
  return x;
}

double to_double(const std::string &key, const std::string &v) {
  size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw InputError("config key '" + key + "': expected a number, got '" + v
                     + "'");
  return x;
}

uint64_t to_u64(const std::string &key, const std::string &v) {
  size_t used = 0;
  uint64_t x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v[0] == '-')
    throw InputError("config key '" + key
                     + "': expected a non-negative integer, got '" + v + "'");
  return x;
}

// "step:nodes,step:nodes"
std::vector<std::pair<int, int>> to_stages(const std::string &key,
                                           const std::string &v) {
  std::vector<std::pair<int, int>> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw InputError("config key '" + key + "': expected step:nodes pairs");
    out.emplace_back(to_int(key, trim(item.substr(0, colon))),
                     to_int(key, trim(item.substr(colon + 1))));
  }
  return out;
}

using Setter = std::function<void(RunConfig &, const std::string &,
                                  const std::string &)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto i = [&](const char *k, auto field) {
      t[k] = [field](RunConfig &c, const std::string &key,
                     const std::string &v) { field(c) = to_int(key, v); };
    };
    auto d = [&](const char *k, auto field) {
      t[k] = [field](RunConfig &c, const std::string &key,
                     const std::string &v) { field(c) = to_double(key, v); };
    };
    i("d_f", [](RunConfig &c) -> int & { return c.net.d_f; });
    i("d_e", [](RunConfig &c) -> int & { return c.net.d_e; });
    i("n_heads", [](RunConfig &c) -> int & { return c.net.n_heads; });
    i("n_layers", [](RunConfig &c) -> int & { return c.net.n_layers; });
    i("n_cycles", [](RunConfig &c) -> int & { return c.net.n_cycles; });
    i("n_ens", [](RunConfig &c) -> int & { return c.net.n_ens; });
    i("d_r", [](RunConfig &c) -> int & { return c.net.d_r; });
    i("max_nodes", [](RunConfig &c) -> int & { return c.net.max_nodes; });
    d("leaky_slope", [](RunConfig &c) -> double & { return c.net.leaky_slope; });
    d("rbf_max", [](RunConfig &c) -> double & { return c.net.rbf_max; });
    d("init_sigma", [](RunConfig &c) -> double & { return c.net.init_sigma; });
    d("lr", [](RunConfig &c) -> double & { return c.train.lr; });
    d("lr_decay", [](RunConfig &c) -> double & { return c.train.lr_decay; });
    i("batch_size", [](RunConfig &c) -> int & { return c.train.batch_size; });
    i("epochs", [](RunConfig &c) -> int & { return c.train.epochs; });
    i("max_steps", [](RunConfig &c) -> int & { return c.train.max_steps; });
    d("gamma1", [](RunConfig &c) -> double & { return c.train.weights.gamma1; });
    d("gamma2", [](RunConfig &c) -> double & { return c.train.weights.gamma2; });
    d("gamma3", [](RunConfig &c) -> double & { return c.train.weights.gamma3; });
    d("mask_ratio", [](RunConfig &c) -> double & { return c.train.mask_ratio; });
    d("noise_ratio", [](RunConfig &c) -> double & { return c.train.noise_ratio; });
    d("dpr_sigma", [](RunConfig &c) -> double & { return c.train.dpr_sigma; });
    d("labeled_fraction",
      [](RunConfig &c) -> double & { return c.train.labeled_fraction; });
    d("clip_norm", [](RunConfig &c) -> double & { return c.train.clip_norm; });
    d("pocket_cutoff", [](RunConfig &c) -> double & { return c.pocket_cutoff; });
    t["max_nodes_stages"] = [](RunConfig &c, const std::string &key,
                               const std::string &v) {
      c.train.max_nodes_stages = to_stages(key, v);
    };
    t["seed"] = [](RunConfig &c, const std::string &key, const std::string &v) {
      c.seed = to_u64(key, v);
      c.train.seed = *c.seed;
    };
    t["task"] = [](RunConfig &c, const std::string &key, const std::string &v) {
      if (v != "pose" && v != "self" && v != "screen")
        throw InputError("config key '" + key
                         + "': expected pose, self or screen");
      c.task = v;
    };
    return t;
  }();
  return table;
}

}  // namespace

void apply_config(std::string_view text, RunConfig &cfg) {
  std::istringstream in { std::string(text) };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno)
                       + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end())
      throw InputError("config line " + std::to_string(lineno)
                       + ": unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.net.validate();
  cfg.train.validate();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto &[k, _]: setters())
    keys.push_back(k);
  return keys;
}

std::string config_to_json(const RunConfig &c) {
  nlohmann::json j;
  j["task"] = c.task;
  j["d_f"] = c.net.d_f;
  j["d_e"] = c.net.d_e;
  j["n_heads"] = c.net.n_heads;
  j["n_layers"] = c.net.n_layers;
  j["n_cycles"] = c.net.n_cycles;
  j["n_ens"] = c.net.n_ens;
  j["d_r"] = c.net.d_r;
  j["max_nodes"] = c.net.max_nodes;
  j["leaky_slope"] = c.net.leaky_slope;
  j["rbf_max"] = c.net.rbf_max;
  j["init_sigma"] = c.net.init_sigma;
  j["lr"] = c.train.lr;
  j["lr_decay"] = c.train.lr_decay;
  j["batch_size"] = c.train.batch_size;
  j["epochs"] = c.train.epochs;
  j["max_steps"] = c.train.max_steps;
  j["max_nodes_stages"] = c.train.max_nodes_stages;
  j["gamma1"] = c.train.weights.gamma1;
  j["gamma2"] = c.train.weights.gamma2;
  j["gamma3"] = c.train.weights.gamma3;
  j["mask_ratio"] = c.train.mask_ratio;
  j["noise_ratio"] = c.train.noise_ratio;
  j["dpr_sigma"] = c.train.dpr_sigma;
  j["labeled_fraction"] = c.train.labeled_fraction;
  j["clip_norm"] = c.train.clip_norm;
  j["pocket_cutoff"] = c.pocket_cutoff;
  j["seed"] = c.train.seed;
  return j.dump();
}

uint64_t resolve_seed(std::optional<uint64_t> flag, const RunConfig &cfg) {
  if (flag)
    return *flag;
  if (cfg.seed)
    return *cfg.seed;
  if (const char *env = std::getenv("LIGPOSE_SEED"); env && *env)
    return to_u64("LIGPOSE_SEED", env);
  return 0;
}

}  // namespace ligpose
