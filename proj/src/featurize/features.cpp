#include "pgnn/featurize/features.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pgnn/errors.hpp"

namespace fs = std::filesystem;

namespace pgnn::features {

namespace {

constexpr std::string_view kAlphabet = "ACDEFGHIKLMNPQRSTVWY";

std::vector<double> read_numbers(std::istream& in, std::size_t count, const fs::path& path) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> v[i])) {
      throw AlignmentError(path.string() + ": expected " + std::to_string(count) +
                           " values, file ends or is malformed at value " + std::to_string(i));
    }
    if (!std::isfinite(v[i])) throw ValidationError(path.string() + ": non-finite feature value");
  }
  return v;
}

}  // namespace

ad::Tensor one_hot_sequence(std::string_view sequence) {
  if (sequence.empty()) throw ValidationError("one_hot_sequence: empty sequence");
  ad::Tensor f({sequence.size(), kOneHotWidth});
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto pos = kAlphabet.find(sequence[i]);
    if (pos == std::string_view::npos) {
      for (std::size_t c = 0; c < kOneHotWidth; ++c) f(i, c) = 1.0 / kOneHotWidth;
    } else {
      f(i, pos) = 1.0;
    }
  }
  return f;
}

ad::Tensor read_node_feature_file(const fs::path& path, std::size_t expected_length) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open node feature file " + path.string());
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols) || cols == 0)
    throw ValidationError(path.string() + ": header must be `L D`");
  if (rows != expected_length)
    throw AlignmentError(path.string() + ": has " + std::to_string(rows) +
                         " rows, expected L = " + std::to_string(expected_length));
  return ad::Tensor({rows, cols}, read_numbers(in, rows * cols, path));
}

ad::Tensor read_edge_feature_file(const fs::path& path, std::size_t expected_length) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge feature file " + path.string());
  std::size_t l1 = 0, l2 = 0, k = 0;
  if (!(in >> l1 >> l2 >> k) || k == 0)
    throw ValidationError(path.string() + ": header must be `L L K`");
  if (l1 != expected_length || l2 != expected_length)
    throw AlignmentError(path.string() + ": is " + std::to_string(l1) + "x" + std::to_string(l2) +
                         ", expected L = " + std::to_string(expected_length));
  return ad::Tensor({l1, l2, k}, read_numbers(in, l1 * l2 * k, path));
}

void write_node_feature_file(const fs::path& path, const ad::Tensor& f) {
  std::ofstream out(path);
  out << f.dim(0) << ' ' << f.dim(1) << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < f.dim(0); ++i) {
    for (std::size_t c = 0; c < f.dim(1); ++c) out << (c ? " " : "") << f(i, c);
    out << '\n';
  }
}

void write_edge_feature_file(const fs::path& path, const ad::Tensor& e) {
  std::ofstream out(path);
  out << e.dim(0) << ' ' << e.dim(1) << ' ' << e.dim(2) << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < e.dim(0); ++i)
    for (std::size_t j = 0; j < e.dim(1); ++j) {
      for (std::size_t c = 0; c < e.dim(2); ++c) out << (c ? " " : "") << e(i, j, c);
      out << '\n';
    }
}

ad::Tensor assemble_node_features(const protein::ProteinRecord& rec, const FeatureSources& sources,
                                  std::vector<std::string>* provenance) {
  const std::size_t n = rec.length();
  std::vector<ad::Tensor> blocks;
  std::vector<std::string> tags;
  if (sources.one_hot) {
    blocks.push_back(one_hot_sequence(rec.sequence));
    for (char aa : kAlphabet) tags.push_back(std::string("onehot:") + aa);
  }
  for (const auto& file : sources.node_files) {
    blocks.push_back(read_node_feature_file(file, n));
    for (std::size_t c = 0; c < blocks.back().dim(1); ++c)
      tags.push_back(file.filename().string() + ":" + std::to_string(c));
  }
  if (blocks.empty()) throw ValidationError("no node feature source configured");

  std::size_t width = 0;
  for (const auto& b : blocks) width += b.dim(1);
  ad::Tensor f({n, width});
  std::size_t col = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < b.dim(1); ++c) f(i, col + c) = b(i, c);
    col += b.dim(1);
  }
  if (provenance) *provenance = std::move(tags);
  return f;
}

InputGraph assemble_input_graph(const protein::ProteinRecord& rec, const FeatureSources& sources) {
  InputGraph g;
  g.id = rec.id;
  g.length = rec.length();
  g.node_features = assemble_node_features(rec, sources, &g.provenance);
  if (sources.edge_file) g.edge_features = read_edge_feature_file(*sources.edge_file, g.length);
  return g;
}

void FeatureStandardizer::fit(const std::vector<InputGraph>& training) {
  if (training.empty()) throw ValidationError("standardizer: empty training split");
  const std::size_t d = training.front().node_dim();
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  std::size_t rows = 0;
  for (const auto& g : training) {
    if (g.node_dim() != d) throw DimensionError("standardizer: inconsistent node feature width");
    for (std::size_t i = 0; i < g.length; ++i)
      for (std::size_t c = 0; c < d; ++c) sum[c] += g.node_features(i, c);
    rows += g.length;
  }
  mean_.assign(d, 0.0);
  scale_.assign(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) mean_[c] = sum[c] / static_cast<double>(rows);
  for (const auto& g : training)
    for (std::size_t i = 0; i < g.length; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        const double x = g.node_features(i, c) - mean_[c];
        sq[c] += x * x;
      }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(sq[c] / static_cast<double>(rows));
    scale_[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
}

void FeatureStandardizer::apply(InputGraph& g) const {
  if (!fitted()) return;
  if (g.node_dim() != mean_.size())
    throw DimensionError("standardizer fitted on " + std::to_string(mean_.size()) +
                         " columns, graph has " + std::to_string(g.node_dim()));
  for (std::size_t i = 0; i < g.length; ++i)
    for (std::size_t c = 0; c < mean_.size(); ++c)
      g.node_features(i, c) = (g.node_features(i, c) - mean_[c]) * scale_[c];
}

nlohmann::json FeatureStandardizer::to_json() const {
  if (!fitted()) return nullptr;
  return {{"mean", mean_}, {"scale", scale_}};
}

FeatureStandardizer FeatureStandardizer::from_json(const nlohmann::json& j) {
  FeatureStandardizer s;
  if (j.is_null()) return s;
  s.mean_ = j.at("mean").get<std::vector<double>>();
  s.scale_ = j.at("scale").get<std::vector<double>>();
  return s;
}

}  // namespace pgnn::features
