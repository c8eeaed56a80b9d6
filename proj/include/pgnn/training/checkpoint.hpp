#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pgnn/autodiff/adam.hpp"
#include "pgnn/autodiff/tensor.hpp"
#include "pgnn/featurize/features.hpp"
#include "pgnn/training/config.hpp"

namespace pgnn::training {

class PgGnnModel;

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers and floats little-endian:
///   "PGNN" | u32 version | u64 n
///   n x (u64 name length, name, u32 rank, rank x u64 extent, f64 values)
///   u64 step, f64 lr, f64 beta1, f64 beta2, f64 eps, u64 m
///   m x (first moment tensor, second moment tensor), tensors as rank/extents/values
///   u64 length, UTF-8 JSON {config, epoch, validation, feature_standardizer}
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::vector<std::pair<std::string, ad::Tensor>> parameters;
  ad::AdamState adam;
  std::uint64_t epoch = 0;
  nlohmann::json validation = nlohmann::json::object();
  TrainingConfig config;
  nlohmann::json feature_standardizer;  // null when features are used raw

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws ValidationError on a bad magic, version, or truncated payload.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint capture(const PgGnnModel& model, const ad::AdamState& adam, std::uint64_t epoch,
                   nlohmann::json validation, const features::FeatureStandardizer* standardizer);

/// Copies parameter values into the model; names and shapes must match.
void restore(PgGnnModel& model, const Checkpoint& ckpt);

}  // namespace pgnn::training
