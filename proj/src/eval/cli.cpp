#include "pgnn/eval/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pgnn/errors.hpp"
#include "pgnn/eval/evaluate.hpp"
#include "pgnn/eval/gradcheck_suite.hpp"
#include "pgnn/eval/metrics.hpp"
#include "pgnn/eval/report.hpp"
#include "pgnn/protein/pdb.hpp"
#include "pgnn/protein/synthetic.hpp"
#include "pgnn/training/trainer.hpp"

namespace pgnn::eval {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fmt_metric(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

int run_train(const std::string& config_path, std::ostream& out) {
  const training::TrainingConfig config = training::load_config(config_path);
  const training::FitResult r = training::fit(config);
  const auto& last = r.history.back();
  out << "epochs " << r.history.size() << (r.early_stopped ? " (early stop)" : "") << '\n';
  out << "last train loss " << last.train.total << ", best epoch " << r.best.epoch
      << ", best val loss " << r.best.validation.at("total_loss").get<double>() << '\n';
  out << "checkpoint " << (std::filesystem::path(config.out_dir) / "best.ckpt").string() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint, manifest, split, out, predictions;
  bool pooled = false;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  if (a.checkpoint.empty() && a.predictions.empty())
    throw ValidationError("eval needs --checkpoint (or --predictions)");
  const auto manifest = protein::load_manifest(a.manifest);
  const auto entries = manifest.split(protein::parse_split(a.split));
  const Aggregation mode = a.pooled ? Aggregation::pair_pooled : Aggregation::protein_mean;
  MetricsReport report;
  if (!a.predictions.empty()) {
    std::optional<protein::DistanceBinSpec> bins;
    if (!a.checkpoint.empty())
      bins = training::load_checkpoint(a.checkpoint).config.bin_spec();
    report = evaluate_predictions(a.predictions, entries, a.split,
                                  bins.value_or(protein::DistanceBinSpec::binary()), mode);
  } else {
    const LoadedModel loaded = load_model(training::load_checkpoint(a.checkpoint));
    report = evaluate_dataset(loaded, entries, a.split, mode);
  }
  const std::filesystem::path dir(a.out);
  write_text(dir / "metrics.json", render_report(report));
  write_text(dir / "per_protein.tsv", render_protein_table(report));
  const auto& d = report.dataset;
  out << "proteins " << d.proteins << ", excluded " << report.exclusions.size() << '\n';
  for (std::size_t r = 0; r < 3; ++r) {
    out << to_string(kRanges[r]);
    for (std::size_t k = 0; k < 4; ++k)
      out << "  L/" << kTopKDivisors[k] << ' ' << fmt_metric(d.topk[r][k].acc);
    out << '\n';
  }
  out << "MAE phi " << fmt_metric(d.mae_phi) << "  psi " << fmt_metric(d.mae_psi) << '\n';
  for (const auto& e : report.exclusions) out << "excluded " << e.id << ": " << e.reason << '\n';
  return kExitOk;
}

struct PredictArgs {
  std::string checkpoint, pdb, out, node_features, edge_features, id;
  char chain = 'A';
};

int run_predict(const PredictArgs& a, std::ostream& out) {
  const LoadedModel loaded = load_model(training::load_checkpoint(a.checkpoint));
  protein::ProteinRecord rec = protein::read_pdb_backbone(a.pdb, a.chain);
  if (!a.id.empty()) rec.id = a.id;
  features::FeatureSources sources;
  sources.one_hot = loaded.model->config().one_hot_features;
  if (!a.node_features.empty()) sources.node_files.push_back(a.node_features);
  if (!a.edge_features.empty()) sources.edge_file = a.edge_features;
  features::InputGraph input = features::assemble_input_graph(rec, sources);
  if (loaded.standardizer) loaded.standardizer->apply(input);
  const training::Prediction p = loaded.model->predict(input);
  write_prediction(a.out, p);
  out << "wrote " << (std::filesystem::path(a.out) / (p.id + ".contacts")).string() << " and "
      << (std::filesystem::path(a.out) / (p.id + ".angles")).string() << '\n';
  return kExitOk;
}

int run_gradcheck(bool full, std::uint64_t seed, std::ostream& out) {
  const GradcheckSuiteResult r = run_gradcheck_suite(full, seed);
  for (const auto& c : r.cases) {
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-4s max_rel %.3e  max_abs %.3e  (%zu coords, %.2fs)",
                  c.name.c_str(), c.report.passed ? "PASS" : "FAIL", c.report.max_rel_error,
                  c.report.max_abs_error, c.report.checked, c.seconds);
    out << line << '\n';
    if (!c.report.passed)
      out << "    worst " << c.report.worst_input << "[" << c.report.worst_index
          << "]: analytic " << c.report.worst_analytic << ", numeric "
          << c.report.worst_numeric << '\n';
  }
  out << (r.passed ? "PASS" : "FAIL") << " (max relative error " << r.max_rel_error << ")\n";
  return r.passed ? kExitOk : kExitRuntime;
}

struct SynthArgs {
  std::string out;
  std::size_t train = 8, val = 2, test = 2, min_length = 20, max_length = 40;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  if (a.min_length < protein::kMinChainLength || a.max_length > protein::kMaxChainLength ||
      a.min_length > a.max_length)
    throw ValidationError("synthetic lengths must satisfy 2 <= min <= max <= 300");
  const std::size_t total = a.train + a.val + a.test;
  if (total == 0) throw ValidationError("synth needs at least one protein");
  const auto records = protein::synthetic_dataset(total, a.min_length, a.max_length, a.seed);
  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir / "pdb");
  protein::DatasetManifest manifest;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto rel = std::filesystem::path("pdb") / (rec.id + ".pdb");
    write_text(dir / rel, protein::write_pdb_backbone(rec));
    protein::ManifestEntry e;
    e.id = rec.id;
    e.pdb_path = rel;
    e.chain = rec.chain;
    e.split = i < a.train ? protein::Split::train
              : i < a.train + a.val ? protein::Split::val
                                    : protein::Split::test;
    manifest.entries.push_back(e);
  }
  protein::write_manifest(dir / "manifest.tsv", manifest);
  out << "wrote " << records.size() << " proteins and " << (dir / "manifest.tsv").string() << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pgnn: joint contact-map and backbone-torsion prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  std::string config_path;
  auto* train = app.add_subcommand("train", "train from a JSON config");
  train->add_option("--config", config_path, "config file")->required();

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a manifest split");
  ev->add_option("--checkpoint", ea.checkpoint, "checkpoint file");
  ev->add_option("--manifest", ea.manifest, "dataset manifest")->required();
  ev->add_option("--split", ea.split, "train, val or test")->required();
  ev->add_option("--out", ea.out, "output directory")->required();
  ev->add_option("--predictions", ea.predictions,
                 "score <id>.contacts/<id>.angles files from this directory instead of running "
                 "the model");
  ev->add_flag("--pooled", ea.pooled, "pool pairs and residues across proteins");

  PredictArgs pa;
  auto* pr = app.add_subcommand("predict", "predict contacts and angles for one chain");
  pr->add_option("--checkpoint", pa.checkpoint, "checkpoint file")->required();
  pr->add_option("--pdb", pa.pdb, "PDB file")->required();
  pr->add_option("--chain", pa.chain, "chain identifier")->required();
  pr->add_option("--out", pa.out, "output directory")->required();
  pr->add_option("--node-features", pa.node_features, "extra node feature file");
  pr->add_option("--edge-features", pa.edge_features, "edge feature file");
  pr->add_option("--id", pa.id, "protein id for the output files (default: file stem)");

  bool full = false;
  std::uint64_t gc_seed = 7;
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gc->add_flag("--full", full, "include the node path and the joint model");
  gc->add_option("--seed", gc_seed, "random seed for the test tensors");

  SynthArgs sa;
  auto* sy = app.add_subcommand("synth", "write a synthetic dataset and manifest");
  sy->add_option("--out", sa.out, "output directory")->required();
  sy->add_option("--train", sa.train, "training proteins");
  sy->add_option("--val", sa.val, "validation proteins");
  sy->add_option("--test", sa.test, "test proteins");
  sy->add_option("--min-length", sa.min_length, "shortest chain");
  sy->add_option("--max-length", sa.max_length, "longest chain");
  sy->add_option("--seed", sa.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitValidation;
  }

  try {
    if (*train) return run_train(config_path, out);
    if (*ev) return run_eval(ea, out);
    if (*pr) return run_predict(pa, out);
    if (*gc) return run_gradcheck(full, gc_seed, out);
    if (*sy) return run_synth(sa, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace pgnn::eval
