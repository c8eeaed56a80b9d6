#include "pgnn/training/config.hpp"

#include <fstream>
#include <set>

#include "pgnn/errors.hpp"

namespace pgnn::training {

using nlohmann::json;

void TrainingConfig::validate() const {
  if (!(lambda >= 0.0)) throw ValidationError("config: lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("config: learning_rate must be > 0");
  if (patience < 1) throw ValidationError("config: patience must be >= 1");
  if (max_epochs < 1) throw ValidationError("config: max_epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("config: batch_size must be >= 1");
  if (clip_norm < 0.0) throw ValidationError("config: clip_norm must be >= 0");
  if (channels == 0 || pair_dim == 0 || hidden_dim == 0 || edge_hidden == 0 ||
      readout_hidden == 0)
    throw ValidationError("config: layer widths must be positive");
  for (auto d : dilations)
    if (d == 0) throw ValidationError("config: dilations must be positive");
  protein::DistanceBinSpec check(bin_boundaries);
  (void)check;
}

json to_json(const TrainingConfig& c) {
  return json{{"lambda", c.lambda},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon},
              {"clip_norm", c.clip_norm},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"seed", c.seed},
              {"stop_gradient", c.stop_gradient},
              {"s_e", c.s_e},
              {"n_conv", c.n_conv},
              {"s_v", c.s_v},
              {"channels", c.channels},
              {"pair_dim", c.pair_dim},
              {"hidden_dim", c.hidden_dim},
              {"edge_hidden", c.edge_hidden},
              {"readout_hidden", c.readout_hidden},
              {"dilations", c.dilations},
              {"bin_boundaries", c.bin_boundaries},
              {"normalize_cross", c.normalize_cross},
              {"sparsify_topk", c.sparsify_topk},
              {"one_hot_features", c.one_hot_features},
              {"standardize_features", c.standardize_features},
              {"node_dim", c.node_dim},
              {"edge_dim", c.edge_dim},
              {"manifest", c.manifest},
              {"out_dir", c.out_dir}};
}

TrainingConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const json defaults = to_json(TrainingConfig{});
  for (const auto& [key, value] : j.items())
    if (!defaults.contains(key)) throw ValidationError("config: unknown key '" + key + "'");
  json merged = defaults;
  merged.update(j);
  TrainingConfig c;
  try {
    c.lambda = merged.at("lambda").get<double>();
    c.learning_rate = merged.at("learning_rate").get<double>();
    c.beta1 = merged.at("beta1").get<double>();
    c.beta2 = merged.at("beta2").get<double>();
    c.epsilon = merged.at("epsilon").get<double>();
    c.clip_norm = merged.at("clip_norm").get<double>();
    c.batch_size = merged.at("batch_size").get<std::size_t>();
    c.max_epochs = merged.at("max_epochs").get<std::size_t>();
    c.patience = merged.at("patience").get<std::size_t>();
    c.seed = merged.at("seed").get<std::uint64_t>();
    c.stop_gradient = merged.at("stop_gradient").get<bool>();
    c.s_e = merged.at("s_e").get<std::size_t>();
    c.n_conv = merged.at("n_conv").get<std::size_t>();
    c.s_v = merged.at("s_v").get<std::size_t>();
    c.channels = merged.at("channels").get<std::size_t>();
    c.pair_dim = merged.at("pair_dim").get<std::size_t>();
    c.hidden_dim = merged.at("hidden_dim").get<std::size_t>();
    c.edge_hidden = merged.at("edge_hidden").get<std::size_t>();
    c.readout_hidden = merged.at("readout_hidden").get<std::size_t>();
    c.dilations = merged.at("dilations").get<std::vector<std::size_t>>();
    c.bin_boundaries = merged.at("bin_boundaries").get<std::vector<double>>();
    c.normalize_cross = merged.at("normalize_cross").get<bool>();
    c.sparsify_topk = merged.at("sparsify_topk").get<std::size_t>();
    c.one_hot_features = merged.at("one_hot_features").get<bool>();
    c.standardize_features = merged.at("standardize_features").get<bool>();
    c.node_dim = merged.at("node_dim").get<std::size_t>();
    c.edge_dim = merged.at("edge_dim").get<std::size_t>();
    c.manifest = merged.at("manifest").get<std::string>();
    c.out_dir = merged.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  TrainingConfig c = config_from_json(j);
  // Relative data paths are relative to the config file.
  const auto base = path.parent_path();
  if (!c.manifest.empty() && std::filesystem::path(c.manifest).is_relative())
    c.manifest = (base / c.manifest).string();
  if (!c.out_dir.empty() && std::filesystem::path(c.out_dir).is_relative())
    c.out_dir = (base / c.out_dir).string();
  return c;
}

}  // namespace pgnn::training
