#include "pgnn/protein/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pgnn/errors.hpp"

namespace fs = std::filesystem;

namespace pgnn::protein {

Split parse_split(const std::string& tag) {
  if (tag == "train") return Split::train;
  if (tag == "val") return Split::val;
  if (tag == "test") return Split::test;
  throw ValidationError("unknown split tag '" + tag + "' (expected train, val or test)");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::vector<ManifestEntry> DatasetManifest::split(Split which) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.split == which) out.push_back(e);
  return out;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("manifest not found: " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };

  DatasetManifest m;
  std::set<std::string> ids;
  std::vector<std::string> missing;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 6)
      throw ParseError("manifest record needs 6 tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);

    ManifestEntry e;
    e.id = fields[0];
    if (e.id.empty()) throw ParseError("empty id", line_no);
    if (!ids.insert(e.id).second) throw ValidationError("duplicate manifest id: " + e.id);
    e.pdb_path = resolve(fields[1]);
    if (fields[2].size() != 1) throw ParseError("chain must be one character", line_no);
    e.chain = fields[2][0];
    if (fields[3] != "-") e.node_feature_path = resolve(fields[3]);
    if (fields[4] != "-") e.edge_feature_path = resolve(fields[4]);
    e.split = parse_split(fields[5]);

    if (!fs::exists(e.pdb_path)) missing.push_back(e.pdb_path.string());
    if (e.node_feature_path && !fs::exists(*e.node_feature_path))
      missing.push_back(e.node_feature_path->string());
    if (e.edge_feature_path && !fs::exists(*e.edge_feature_path))
      missing.push_back(e.edge_feature_path->string());
    m.entries.push_back(std::move(e));
  }
  if (!missing.empty()) {
    std::string msg = "manifest references missing files:";
    for (const auto& p : missing) msg += " " + p;
    throw ValidationError(msg);
  }
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write manifest " + path.string());
  auto opt = [](const std::optional<fs::path>& p) { return p ? p->string() : std::string("-"); };
  for (const auto& e : manifest.entries)
    out << e.id << '\t' << e.pdb_path.string() << '\t' << e.chain << '\t'
        << opt(e.node_feature_path) << '\t' << opt(e.edge_feature_path) << '\t'
        << to_string(e.split) << '\n';
}

}  // namespace pgnn::protein
