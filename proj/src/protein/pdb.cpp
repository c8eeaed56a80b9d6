#include "pgnn/protein/pdb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pgnn/errors.hpp"

namespace pgnn::protein {

namespace {

const std::map<std::string, char>& residue_codes() {
  static const std::map<std::string, char> codes = {
      {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'},
      {"GLN", 'Q'}, {"GLU", 'E'}, {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'},
      {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'}, {"PRO", 'P'},
      {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'},
      {"MSE", 'M'}};
  return codes;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(' ');
  return std::string(s.substr(b, e - b + 1));
}

double parse_coordinate(std::string_view line, std::size_t start, std::size_t line_no,
                        const char* axis) {
  const std::string field = trim(line.substr(start, 8));
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(std::string("malformed ") + axis + " coordinate '" + field + "'", line_no);
  return v;
}

int parse_seq_number(std::string_view line, std::size_t line_no) {
  const std::string field = trim(line.substr(22, 4));
  int v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("malformed residue sequence number '" + field + "'", line_no);
  return v;
}

}  // namespace

char one_letter_code(const std::string& residue_name) {
  const auto it = residue_codes().find(residue_name);
  return it == residue_codes().end() ? 'X' : it->second;
}

std::string three_letter_code(char one_letter) {
  for (const auto& [name, code] : residue_codes())
    if (code == one_letter && name != "MSE") return name;
  return "UNK";
}

ProteinRecord parse_pdb_backbone(std::string_view text, char chain, std::string id) {
  struct Key {
    int seq;
    char icode;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, BackboneResidue> residues;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.starts_with("ENDMDL")) break;
    if (!line.starts_with("ATOM  ")) continue;
    if (line.size() < 54)
      throw ParseError("ATOM record shorter than 54 columns", line_no);
    if (line[21] != chain) continue;

    const std::string atom = trim(line.substr(12, 4));
    if (atom != "N" && atom != "CA" && atom != "C") continue;

    const Key key{parse_seq_number(line, line_no), line[26]};
    const Vec3 xyz{parse_coordinate(line, 30, line_no, "x"),
                   parse_coordinate(line, 38, line_no, "y"),
                   parse_coordinate(line, 46, line_no, "z")};

    auto [it, inserted] = residues.try_emplace(key);
    BackboneResidue& res = it->second;
    if (inserted) {
      res.seq_number = key.seq;
      res.insertion_code = key.icode;
      res.name = trim(line.substr(17, 3));
    }
    std::optional<Vec3>& slot = atom == "N" ? res.n : atom == "CA" ? res.ca : res.c;
    if (!slot) slot = xyz;  // first altLoc wins
  }

  if (residues.empty())
    throw EmptyChainError("no ATOM records for chain '" + std::string(1, chain) + "'");

  ProteinRecord rec;
  rec.id = std::move(id);
  rec.chain = chain;
  std::optional<int> previous;
  for (auto& [key, res] : residues) {
    if (previous && key.seq > *previous + 1) {
      const long gap = static_cast<long>(key.seq) - *previous - 1;
      if (rec.backbone.size() + gap > kMaxChainLength)
        throw LengthFilterError("chain " + std::string(1, chain) + " exceeds " +
                                    std::to_string(kMaxChainLength) + " residues",
                                rec.backbone.size() + gap);
      for (int s = *previous + 1; s < key.seq; ++s) {
        BackboneResidue hole;
        hole.seq_number = s;
        rec.backbone.push_back(hole);
        rec.sequence.push_back('X');
      }
    }
    rec.sequence.push_back(one_letter_code(res.name));
    rec.backbone.push_back(res);
    previous = key.seq;
  }

  const std::size_t n = rec.backbone.size();
  if (n > kMaxChainLength)
    throw LengthFilterError("chain " + std::string(1, chain) + " has " + std::to_string(n) +
                                " residues, more than " + std::to_string(kMaxChainLength),
                            n);
  if (n < kMinChainLength)
    throw LengthFilterError("chain " + std::string(1, chain) + " has " + std::to_string(n) +
                                " residue(s), fewer than " + std::to_string(kMinChainLength),
                            n);
  return rec;
}

ProteinRecord read_pdb_backbone(const std::filesystem::path& path, char chain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open PDB file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pdb_backbone(ss.str(), chain, path.stem().string());
}

std::string write_pdb_backbone(const ProteinRecord& record) {
  std::string out;
  int serial = 1;
  char buf[96];
  for (const auto& res : record.backbone) {
    const std::pair<const char*, const std::optional<Vec3>*> atoms[] = {
        {" N  ", &res.n}, {" CA ", &res.ca}, {" C  ", &res.c}};
    for (const auto& [name, xyz] : atoms) {
      if (!*xyz) continue;
      const Vec3& p = **xyz;
      std::snprintf(buf, sizeof buf,
                    "ATOM  %5d %4s %3s %c%4d%c   %8.3f%8.3f%8.3f  1.00  0.00           %c\n",
                    serial++ % 100000, name, res.name.c_str(), record.chain, res.seq_number,
                    res.insertion_code, p[0], p[1], p[2], name[1]);
      out += buf;
    }
  }
  out += "TER\nEND\n";
  return out;
}

}  // namespace pgnn::protein
