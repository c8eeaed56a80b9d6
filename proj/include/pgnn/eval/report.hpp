#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pgnn/protein/geometry.hpp"
#include "pgnn/training/model.hpp"

namespace pgnn::eval {

/// One top-L/k cell. err is always 1 - acc.
struct TopKCell {
  std::optional<double> acc;
  std::optional<double> err;
  std::size_t selected = 0;
  std::size_t hits = 0;
  std::size_t shortfall = 0;

  bool operator==(const TopKCell&) const = default;
};

// Indexed [range: SR, MR, LR][k: 10, 5, 2, 1].
using TopKTable = std::array<std::array<TopKCell, 4>, 3>;

struct ProteinMetrics {
  std::string id;
  std::size_t length = 0;
  TopKTable topk{};
  std::optional<double> mae_phi, mae_psi;
  std::size_t phi_count = 0, psi_count = 0;
  std::optional<double> pair_accuracy;

  bool operator==(const ProteinMetrics&) const = default;
};

struct DatasetMetrics {
  std::size_t proteins = 0;
  TopKTable topk{};
  std::optional<double> mae_phi, mae_psi;
  std::optional<double> pair_accuracy;

  bool operator==(const DatasetMetrics&) const = default;
};

struct Exclusion {
  std::string id;
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

enum class Aggregation { protein_mean, pair_pooled };

struct MetricsReport {
  std::string version;
  std::string split;
  Aggregation aggregation = Aggregation::protein_mean;
  nlohmann::json config = nlohmann::json::object();
  DatasetMetrics dataset;
  std::vector<ProteinMetrics> proteins;
  std::vector<Exclusion> exclusions;

  bool operator==(const MetricsReport&) const = default;
};

/// Metrics of one protein from predicted contact probabilities [L x L] and
/// predicted angles, against the ground truth.
ProteinMetrics protein_metrics(const std::string& id, const ad::Tensor& contact_map,
                               std::span<const double> phi, std::span<const double> psi,
                               const protein::TargetGeometry& truth);
ProteinMetrics protein_metrics(const training::Prediction& prediction,
                               const protein::TargetGeometry& truth);

/// Unweighted mean across proteins (protein_mean) or counts pooled across
/// proteins (pair_pooled). Cells no protein contributes to stay absent.
DatasetMetrics aggregate(const std::vector<ProteinMetrics>& proteins, Aggregation mode);

std::string library_version();

nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);
std::string render_report(const MetricsReport& report);
MetricsReport parse_report(const std::string& text);

/// Tab-separated per-protein table with a header row.
std::string render_protein_table(const MetricsReport& report);

}  // namespace pgnn::eval
