// Copyright 2026 The LAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lae/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lae/common/error.hpp"

namespace lae::harness {

namespace {

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::size_t pos = 0;
  std::uint64_t out = 0;
  if (v.empty() || v[0] == '-') throw ConfigError("expected a non-negative integer, got '" + v + "'");
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected a non-negative integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return out;
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, F convert) {
  std::istringstream is(v);
  std::vector<T> out;
  std::string item;
  while (is >> item) {
    if (item.back() == ',') item.pop_back();
    if (!item.empty()) out.push_back(static_cast<T>(convert(item)));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"experiment",
       {
           {"kind", [](auto& c, const auto& v) { c.kind = v; }},
           {"seed", [](auto& c, const auto& v) { c.seed = to_u64(v); }},
           {"out", [](auto& c, const auto& v) { c.out_dir = v; }},
       }},
      {"model",
       {
           {"kind", [](auto& c, const auto& v) { c.model.kind = v; }},
           {"obs_cov", [](auto& c, const auto& v) { c.model.obs_cov = to_list<double>(v, to_double); }},
           {"latent_dim", [](auto& c, const auto& v) { c.model.latent_dim = to_u64(v); }},
           {"decoder_hidden", [](auto& c, const auto& v) { c.model.decoder_hidden = to_u64(v); }},
           {"decoder_layers", [](auto& c, const auto& v) { c.model.decoder_layers = to_u64(v); }},
           {"decoder_weight_std", [](auto& c, const auto& v) { c.model.decoder_weight_std = to_double(v); }},
           {"decoder_bias_std", [](auto& c, const auto& v) { c.model.decoder_bias_std = to_double(v); }},
           {"sigma_x", [](auto& c, const auto& v) { c.model.sigma_x = to_double(v); }},
           {"layer_norm", [](auto& c, const auto& v) { c.model.layer_norm = to_bool(v); }},
           {"initial_scale_pre", [](auto& c, const auto& v) { c.model.initial_scale_pre = to_double(v); }},
       }},
      {"encoder",
       {
           {"features", [](auto& c, const auto& v) { c.features.kind = v; }},
           {"hidden", [](auto& c, const auto& v) { c.features.hidden = to_u64(v); }},
           {"hidden_layers", [](auto& c, const auto& v) { c.features.hidden_layers = to_u64(v); }},
           {"feature_dim", [](auto& c, const auto& v) { c.features.feature_dim = to_u64(v); }},
           {"row_norm", [](auto& c, const auto& v) { c.features.row_norm = to_double(v); }},
           {"frequency", [](auto& c, const auto& v) { c.features.frequency = to_double(v); }},
           {"layer_norm", [](auto& c, const auto& v) { c.features.layer_norm = to_bool(v); }},
           {"phi_init_std", [](auto& c, const auto& v) { c.phi_init_std = to_double(v); }},
           {"venc_hidden", [](auto& c, const auto& v) { c.venc_hidden = to_u64(v); }},
       }},
      {"sampler",
       {
           {"step_size", [](auto& c, const auto& v) { c.sampler.step_size = to_double(v); }},
           {"beta", [](auto& c, const auto& v) { c.sampler.beta = to_double(v); }},
           {"mh_correction", [](auto& c, const auto& v) { c.sampler.mh_correction = to_bool(v); }},
           {"burn_in", [](auto& c, const auto& v) { c.sampler.burn_in = to_u64(v); }},
           {"total_steps", [](auto& c, const auto& v) { c.sampler.total_steps = to_u64(v); }},
           {"ablation_dims", [](auto& c, const auto& v) { c.ablation_dims = to_list<std::size_t>(v, to_u64); }},
           {"vi_iterations", [](auto& c, const auto& v) { c.vi_iterations = to_u64(v); }},
           {"vi_samples", [](auto& c, const auto& v) { c.vi_samples = to_u64(v); }},
           {"vi_learning_rate", [](auto& c, const auto& v) { c.vi_learning_rate = to_double(v); }},
       }},
      {"trainer",
       {
           {"inner_steps", [](auto& c, const auto& v) { c.trainer.inner_steps = to_u64(v); }},
           {"learning_rate", [](auto& c, const auto& v) { c.trainer.learning_rate = to_double(v); }},
           {"feature_learning_rate", [](auto& c, const auto& v) { c.trainer.feature_learning_rate = to_double(v); }},
           {"batch_size", [](auto& c, const auto& v) { c.trainer.batch_size = to_u64(v); }},
           {"step_size", [](auto& c, const auto& v) { c.trainer.step_size = to_double(v); }},
           {"mh_correction", [](auto& c, const auto& v) { c.trainer.mh_correction = to_bool(v); }},
           {"epochs", [](auto& c, const auto& v) { c.trainer.epochs = to_u64(v); }},
           {"estimator", [](auto& c, const auto& v) { c.trainer.estimator = trainers::parse_estimator(v); }},
           {"optimizer", [](auto& c, const auto& v) { c.trainer.optimizer = v; }},
           {"eval_sigma", [](auto& c, const auto& v) { c.trainer.eval_sigma = to_double(v); }},
           {"eval_samples", [](auto& c, const auto& v) { c.trainer.eval_samples = to_u64(v); }},
           {"ld_steps", [](auto& c, const auto& v) { c.ld_steps = to_list<std::size_t>(v, to_u64); }},
       }},
      {"data",
       {
           {"train_images", [](auto& c, const auto& v) { c.data.train_images = v; }},
           {"heldout_images", [](auto& c, const auto& v) { c.data.heldout_images = v; }},
           {"train_count", [](auto& c, const auto& v) { c.data.train_count = to_u64(v); }},
           {"heldout_count", [](auto& c, const auto& v) { c.data.heldout_count = to_u64(v); }},
           {"datapoints", [](auto& c, const auto& v) { c.data.datapoints = to_u64(v); }},
           {"seed", [](auto& c, const auto& v) { c.data.seed = to_u64(v); }},
           {"checkpoint", [](auto& c, const auto& v) { c.data.checkpoint = v; }},
       }},
  };
  return table;
}

bool is_image_kind(const std::string& kind) {
  return kind == "train-lae" || kind == "train-ae" || kind == "train-vae" || kind == "train-hoffman" ||
         kind == "eval-elbo";
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kinds = {"conjugate-ald", "sample-ld",   "capacity-ablation",
                                                 "neural-posterior", "train-lae", "train-ae",
                                                 "train-vae",     "train-hoffman", "eval-elbo"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  if (model.kind != "conjugate" && model.kind != "neural-toy" && model.kind != "image") {
    throw ConfigError("unknown model kind '" + model.kind + "'");
  }
  if (model.kind == "conjugate" && model.obs_cov.size() != 4) {
    throw ConfigError("model.obs_cov needs four entries");
  }
  if (!(model.sigma_x > 0.0)) throw ConfigError("model.sigma_x must be positive");
  if (data.datapoints == 0) throw ConfigError("data.datapoints must be positive");
  sampler.validate();
  trainer.validate();
  for (const auto* path : {&data.train_images, &data.heldout_images}) {
    if (!path->empty() && !std::filesystem::exists(*path)) throw ConfigError("missing input file " + *path);
  }
  if (kind == "eval-elbo" && (data.checkpoint.empty() || !std::filesystem::exists(data.checkpoint))) {
    throw ConfigError("eval-elbo needs an existing data.checkpoint");
  }
}

ExperimentConfig default_config(const std::string& kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  if (kind == "neural-posterior") {
    cfg.model.kind = "neural-toy";
    cfg.features.row_norm = 8.0;
  }
  if (is_image_kind(kind)) {
    cfg.model.kind = "image";
    cfg.model.latent_dim = 8;
    cfg.model.decoder_hidden = 256;
    cfg.features.kind = "relu";
    cfg.features.hidden = 256;
    cfg.features.feature_dim = 128;
    cfg.features.row_norm = 2.0;
    cfg.features.layer_norm = true;
    cfg.phi_init_std = 0.01;
  }
  return cfg;
}

void apply_config(ExperimentConfig& cfg, std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    auto sit = table.find(section);
    if (sit == table.end()) throw ConfigError("unknown config section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      auto kit = sit->second.find(key);
      if (kit == sit->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      try {
        kit->second(cfg, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
      }
    }
  }
}

ExperimentConfig parse_config(std::istream& is) {
  std::stringstream buffer;
  buffer << is.rdbuf();
  boost::property_tree::ptree tree;
  std::string kind = "conjugate-ald";
  {
    std::istringstream probe(buffer.str());
    try {
      boost::property_tree::ini_parser::read_ini(probe, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    kind = tree.get<std::string>("experiment.kind", kind);
  }
  ExperimentConfig cfg = default_config(kind);
  std::istringstream body(buffer.str());
  apply_config(cfg, body);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return parse_config(is);
}

}  // namespace lae::harness
