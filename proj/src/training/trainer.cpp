#include "pgnn/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "pgnn/errors.hpp"
#include "pgnn/eval/metrics.hpp"
#include "pgnn/protein/pdb.hpp"
#include "pgnn/training/losses.hpp"

namespace pgnn::training {

using nlohmann::json;

Example make_example(const protein::ProteinRecord& rec, const TrainingConfig& config,
                     const features::FeatureSources& sources) {
  Example ex;
  ex.input = features::assemble_input_graph(rec, sources);
  ex.target = protein::derive_targets(rec, config.bin_spec());
  return ex;
}

std::vector<Example> load_examples(const std::vector<protein::ManifestEntry>& entries,
                                   const TrainingConfig& config) {
  std::vector<Example> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    protein::ProteinRecord rec = protein::read_pdb_backbone(e.pdb_path, e.chain);
    rec.id = e.id;
    features::FeatureSources sources;
    sources.one_hot = config.one_hot_features;
    if (e.node_feature_path) sources.node_files.push_back(*e.node_feature_path);
    sources.edge_file = e.edge_feature_path;
    out.push_back(make_example(rec, config, sources));
  }
  return out;
}

namespace {

struct LossVars {
  ad::Var edge, node, total;
};

LossVars losses(const ModelVars& vars, const Example& ex, double lambda) {
  const auto& t = ex.target;
  LossVars l;
  l.edge = edge_loss(vars.edge.logits, t.bin_labels, t.contact_mask);
  l.node = node_loss(vars.v, t.phi, t.psi, t.phi_mask, t.psi_mask);
  l.total = total_loss(l.edge, l.node, lambda);
  return l;
}

LossValues values(const LossVars& l) {
  return {l.edge.value().item(), l.node.value().item(), l.total.value().item()};
}

}  // namespace

Evaluation evaluate_example(const PgGnnModel& model, const Example& example) {
  ad::Graph g(false);
  const ModelVars vars = model.forward(g, example.input);
  Evaluation e;
  e.loss = values(losses(vars, example, model.config().lambda));
  e.prediction.id = example.id();
  e.prediction.edge = edge::to_output(vars.edge, model.contact_labels());
  e.prediction.node = node::recover_angles(vars.v.value());
  return e;
}

json validation_snapshot(const PgGnnModel& model, std::span<const Example> examples) {
  LossValues mean;
  double pair_acc = 0.0, mae_phi = 0.0, mae_psi = 0.0;
  std::size_t n_pair = 0, n_phi = 0, n_psi = 0;
  for (const auto& ex : examples) {
    const Evaluation e = evaluate_example(model, ex);
    mean.edge += e.loss.edge;
    mean.node += e.loss.node;
    mean.total += e.loss.total;
    const auto& t = ex.target;
    if (auto a = eval::contact_pair_accuracy(e.prediction.edge.contact_map, t.distance,
                                             t.contact_mask)) {
      pair_acc += *a;
      ++n_pair;
    }
    if (auto a = eval::angle_mae(e.prediction.node.phi, t.phi, t.phi_mask)) {
      mae_phi += *a;
      ++n_phi;
    }
    if (auto a = eval::angle_mae(e.prediction.node.psi, t.psi, t.psi_mask)) {
      mae_psi += *a;
      ++n_psi;
    }
  }
  const double count = static_cast<double>(std::max<std::size_t>(examples.size(), 1));
  auto avg = [](double s, std::size_t n) -> json {
    return n ? json(s / static_cast<double>(n)) : json(nullptr);
  };
  return json{{"proteins", examples.size()},
              {"edge_loss", mean.edge / count},
              {"node_loss", mean.node / count},
              {"total_loss", mean.total / count},
              {"pair_accuracy", avg(pair_acc, n_pair)},
              {"mae_phi", avg(mae_phi, n_phi)},
              {"mae_psi", avg(mae_psi, n_psi)}};
}

Trainer::Trainer(PgGnnModel& model, const TrainingConfig& config)
    : model_(model),
      config_(config),
      adam_(ad::AdamState::for_parameters(
          model.parameters(),
          {config.learning_rate, config.beta1, config.beta2, config.epsilon})) {}

StepResult Trainer::step(std::span<const Example* const> batch) {
  if (batch.empty()) throw ContractError("train step needs a nonempty batch");
  auto& params = model_.parameters();
  params.zero_grad();
  StepResult r;
  const double share = 1.0 / static_cast<double>(batch.size());
  for (const Example* ex : batch) {
    ad::Graph g;
    LossVars l;
    try {
      l = losses(model_.forward(g, ex->input), *ex, config_.lambda);
    } catch (const NonFiniteError& e) {
      params.zero_grad();
      throw NonFiniteError("protein " + ex->id() + ": " + e.what());
    }
    const LossValues v = values(l);
    if (!std::isfinite(v.total) || !std::isfinite(v.edge) || !std::isfinite(v.node)) {
      params.zero_grad();
      throw NonFiniteError("protein " + ex->id() + ": non-finite loss, step aborted");
    }
    g.backward(ad::scale(l.total, share));
    r.loss.edge += v.edge * share;
    r.loss.node += v.node * share;
    r.loss.total += v.total * share;
  }
  r.grad_norm = params.grad_norm();
  if (!std::isfinite(r.grad_norm)) {
    params.zero_grad();
    throw NonFiniteError("non-finite gradient in batch starting with protein " +
                         batch.front()->id() + ", step aborted");
  }
  if (config_.clip_norm > 0.0 && r.grad_norm > config_.clip_norm)
    params.scale_grads(config_.clip_norm / r.grad_norm);
  ad::adam_step(params, adam_);
  return r;
}

json to_json(const EpochRecord& r, const TrainingConfig& config) {
  return json{{"epoch", r.epoch},
              {"train", {{"edge_loss", r.train.edge},
                         {"node_loss", r.train.node},
                         {"total_loss", r.train.total}}},
              {"validation", r.validation},
              {"improved", r.improved},
              {"seconds", r.seconds},
              {"lambda", config.lambda},
              {"learning_rate", config.learning_rate},
              {"clip_norm", config.clip_norm},
              {"init", "xavier_uniform"}};
}

FitResult fit(PgGnnModel& model, Trainer& trainer, const std::vector<Example>& train,
              const std::vector<Example>& val, const TrainingConfig& config,
              const FitOptions& options) {
  if (train.empty()) throw ValidationError("training split is empty");
  if (val.empty()) throw ValidationError("validation split is empty");
  FitResult result;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      std::vector<const Example*> batch;
      for (std::size_t k = b; k < std::min(order.size(), b + config.batch_size); ++k)
        batch.push_back(&train[order[k]]);
      const StepResult s = trainer.step(batch);
      rec.train.edge += s.loss.edge;
      rec.train.node += s.loss.node;
      rec.train.total += s.loss.total;
      ++steps;
    }
    rec.train.edge /= static_cast<double>(steps);
    rec.train.node /= static_cast<double>(steps);
    rec.train.total /= static_cast<double>(steps);

    rec.validation = validation_snapshot(model, val);
    const double val_total = rec.validation.at("total_loss").get<double>();
    if (!have_best || val_total < best) {
      best = val_total;
      have_best = true;
      stale = 0;
      rec.improved = true;
      result.best = capture(model, trainer.adam(), epoch, rec.validation, options.standardizer);
    } else {
      ++stale;
    }
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(rec);

    const bool keep_going = !options.on_epoch || options.on_epoch(rec, model);
    if (stale >= config.patience) {
      result.early_stopped = true;
      break;
    }
    if (!keep_going) break;
  }
  return result;
}

FitResult fit(const TrainingConfig& input_config) {
  TrainingConfig config = input_config;
  if (config.manifest.empty()) throw ValidationError("config: manifest is required for training");
  if (config.out_dir.empty()) throw ValidationError("config: out_dir is required for training");
  const auto manifest = protein::load_manifest(config.manifest);
  const auto train_entries = manifest.split(protein::Split::train);
  const auto val_entries = manifest.split(protein::Split::val);
  if (train_entries.empty()) throw ValidationError("manifest has no train proteins");
  if (val_entries.empty()) throw ValidationError("manifest has no val proteins");

  std::vector<Example> train = load_examples(train_entries, config);
  std::vector<Example> val = load_examples(val_entries, config);

  features::FeatureStandardizer standardizer;
  if (config.standardize_features) {
    std::vector<features::InputGraph> graphs;
    for (const auto& ex : train) graphs.push_back(ex.input);
    standardizer.fit(graphs);
    for (auto& ex : train) standardizer.apply(ex.input);
    for (auto& ex : val) standardizer.apply(ex.input);
  }

  const std::size_t node_dim = train.front().input.node_dim();
  const std::size_t edge_dim = train.front().input.edge_dim();
  for (const auto* split : {&train, &val})
    for (const auto& ex : *split)
      if (ex.input.node_dim() != node_dim || ex.input.edge_dim() != edge_dim)
        throw ValidationError("protein " + ex.id() +
                              ": feature widths differ from the first training protein");
  if (config.node_dim != 0 && config.node_dim != node_dim)
    throw ValidationError("config node_dim " + std::to_string(config.node_dim) +
                          " does not match the data (" + std::to_string(node_dim) + ")");
  if (config.edge_dim != 0 && config.edge_dim != edge_dim)
    throw ValidationError("config edge_dim " + std::to_string(config.edge_dim) +
                          " does not match the data (" + std::to_string(edge_dim) + ")");
  config.node_dim = node_dim;
  config.edge_dim = edge_dim;

  PgGnnModel model(config);
  Trainer trainer(model, config);
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  std::ofstream log(out_dir / "train_log.jsonl", std::ios::trunc);
  if (!log) throw std::runtime_error("cannot write " + (out_dir / "train_log.jsonl").string());

  FitOptions options;
  options.standardizer = config.standardize_features ? &standardizer : nullptr;
  options.on_epoch = [&](const EpochRecord& rec, const PgGnnModel&) {
    log << to_json(rec, config).dump() << '\n';
    log.flush();
    return true;
  };
  FitResult result = fit(model, trainer, train, val, config, options);
  save_checkpoint(out_dir / "best.ckpt", result.best);
  save_checkpoint(out_dir / "last.ckpt",
                  capture(model, trainer.adam(), result.history.back().epoch,
                          result.history.back().validation, options.standardizer));
  return result;
}

}  // namespace pgnn::training
