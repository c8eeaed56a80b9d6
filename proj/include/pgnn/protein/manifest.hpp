#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pgnn::protein {

enum class Split { train, val, test };

Split parse_split(const std::string& tag);
std::string to_string(Split split);

struct ManifestEntry {
  std::string id;
  std::filesystem::path pdb_path;
  char chain = 'A';
  std::optional<std::filesystem::path> node_feature_path;
  std::optional<std::filesystem::path> edge_feature_path;
  Split split = Split::train;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> split(Split which) const;
};

/// Tab-separated `id pdb_path chain node_feat edge_feat split`, `-` for an
/// absent feature path. Blank lines and lines starting with '#' are skipped.
/// Relative paths resolve against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace pgnn::protein
