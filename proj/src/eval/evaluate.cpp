#include "pgnn/eval/evaluate.hpp"

#include "pgnn/errors.hpp"
#include "pgnn/eval/prediction_io.hpp"
#include "pgnn/protein/pdb.hpp"

namespace pgnn::eval {

LoadedModel load_model(const training::Checkpoint& checkpoint) {
  LoadedModel out;
  out.model = std::make_unique<training::PgGnnModel>(checkpoint.config);
  training::restore(*out.model, checkpoint);
  if (!checkpoint.feature_standardizer.is_null())
    out.standardizer = features::FeatureStandardizer::from_json(checkpoint.feature_standardizer);
  return out;
}

training::Example load_example(const protein::ManifestEntry& entry, const LoadedModel& loaded) {
  auto examples = training::load_examples({entry}, loaded.model->config());
  if (loaded.standardizer) loaded.standardizer->apply(examples.front().input);
  return std::move(examples.front());
}

namespace {

MetricsReport start_report(const std::string& split_tag, Aggregation mode) {
  MetricsReport r;
  r.version = library_version();
  r.split = split_tag;
  r.aggregation = mode;
  return r;
}

}  // namespace

MetricsReport evaluate_dataset(const LoadedModel& loaded,
                               const std::vector<protein::ManifestEntry>& entries,
                               const std::string& split_tag, Aggregation mode) {
  if (entries.empty()) throw ValidationError("split '" + split_tag + "' has no proteins");
  MetricsReport r = start_report(split_tag, mode);
  r.config = training::to_json(loaded.model->config());
  for (const auto& entry : entries) {
    try {
      const training::Example ex = load_example(entry, loaded);
      const training::Prediction p = loaded.model->predict(ex.input);
      r.proteins.push_back(protein_metrics(p, ex.target));
    } catch (const std::exception& e) {
      r.exclusions.push_back({entry.id, e.what()});
    }
  }
  r.dataset = aggregate(r.proteins, mode);
  return r;
}

MetricsReport evaluate_predictions(const std::filesystem::path& dir,
                                   const std::vector<protein::ManifestEntry>& entries,
                                   const std::string& split_tag,
                                   const protein::DistanceBinSpec& bins, Aggregation mode) {
  if (entries.empty()) throw ValidationError("split '" + split_tag + "' has no proteins");
  MetricsReport r = start_report(split_tag, mode);
  r.config = nlohmann::json{{"predictions", dir.string()}, {"bin_boundaries", bins.boundaries()}};
  for (const auto& entry : entries) {
    try {
      protein::ProteinRecord rec = protein::read_pdb_backbone(entry.pdb_path, entry.chain);
      const protein::TargetGeometry truth = protein::derive_targets(rec, bins);
      const ContactFile contacts = read_contacts(dir / (entry.id + ".contacts"));
      const AngleFile angles = read_angles(dir / (entry.id + ".angles"));
      if (contacts.length != truth.length || angles.phi.size() != truth.length)
        throw AlignmentError("prediction length differs from the structure (" +
                             std::to_string(truth.length) + ")");
      r.proteins.push_back(
          protein_metrics(entry.id, contacts.contact_map, angles.phi, angles.psi, truth));
    } catch (const std::exception& e) {
      r.exclusions.push_back({entry.id, e.what()});
    }
  }
  r.dataset = aggregate(r.proteins, mode);
  return r;
}

void write_prediction(const std::filesystem::path& dir, const training::Prediction& prediction) {
  write_contacts(dir / (prediction.id + ".contacts"), prediction.edge);
  write_angles(dir / (prediction.id + ".angles"), predicted_angles(prediction.node));
}

}  // namespace pgnn::eval
