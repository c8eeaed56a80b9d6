#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pgnn::protein {

using Vec3 = std::array<double, 3>;

struct BackboneResidue {
  int seq_number = 0;
  char insertion_code = ' ';
  std::string name = "UNK";  // three-letter residue name
  std::optional<Vec3> n;
  std::optional<Vec3> ca;
  std::optional<Vec3> c;

  bool operator==(const BackboneResidue&) const = default;
};

/// Backbone of one chain, residues in ascending sequence-number order.
struct ProteinRecord {
  std::string id;
  char chain = 'A';
  std::string sequence;  // one-letter codes, 'X' for unknown or gap residues
  std::vector<BackboneResidue> backbone;

  std::size_t length() const { return backbone.size(); }
  bool operator==(const ProteinRecord&) const = default;
};

char one_letter_code(const std::string& residue_name);
std::string three_letter_code(char one_letter);

}  // namespace pgnn::protein
