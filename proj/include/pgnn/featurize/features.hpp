#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pgnn/autodiff/tensor.hpp"
#include "pgnn/protein/record.hpp"

namespace pgnn::features {

inline constexpr std::size_t kOneHotWidth = 20;

/// Model input for one protein.
struct InputGraph {
  std::string id;
  std::size_t length = 0;
  ad::Tensor node_features;                  // [L x D]
  std::optional<ad::Tensor> edge_features;   // [L x L x K], absent when K = 0
  std::vector<std::string> provenance;       // one tag per node feature column

  std::size_t node_dim() const { return node_features.dim(1); }
  std::size_t edge_dim() const { return edge_features ? edge_features->dim(2) : 0; }
};

struct FeatureSources {
  bool one_hot = true;                                 // synthetic mode: one-hot amino acids
  std::vector<std::filesystem::path> node_files;       // concatenated after the one-hot block
  std::optional<std::filesystem::path> edge_file;
};

/// [L x 20] one-hot in "ACDEFGHIKLMNPQRSTVWY" order; unknown residues get
/// 1/20 in every column so each row still sums to one.
ad::Tensor one_hot_sequence(std::string_view sequence);

/// Node feature file: first line `L D`, then L rows of D values.
ad::Tensor read_node_feature_file(const std::filesystem::path& path, std::size_t expected_length);
/// Edge feature file: first line `L L K`, then L*L rows of K values, (i, j) row-major.
ad::Tensor read_edge_feature_file(const std::filesystem::path& path, std::size_t expected_length);
void write_node_feature_file(const std::filesystem::path& path, const ad::Tensor& features);
void write_edge_feature_file(const std::filesystem::path& path, const ad::Tensor& features);

/// Column-concatenation of the available node sources. Throws AlignmentError
/// when a file's row count differs from L, ValidationError when no source is
/// configured.
ad::Tensor assemble_node_features(const protein::ProteinRecord& rec, const FeatureSources& sources,
                                  std::vector<std::string>* provenance = nullptr);

InputGraph assemble_input_graph(const protein::ProteinRecord& rec, const FeatureSources& sources);

/// Per-column standardization with statistics from the training split.
class FeatureStandardizer {
 public:
  void fit(const std::vector<InputGraph>& training);
  void apply(InputGraph& graph) const;
  bool fitted() const { return !mean_.empty(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

  nlohmann::json to_json() const;
  static FeatureStandardizer from_json(const nlohmann::json& j);

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;  // 1 / stddev, or 1 for constant columns
};

}  // namespace pgnn::features
