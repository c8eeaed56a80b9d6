#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pgnn/protein/record.hpp"

namespace pgnn::protein {

inline constexpr std::size_t kMaxChainLength = 300;
inline constexpr std::size_t kMinChainLength = 2;

/// Reads N, CA and C from fixed-column ATOM records of one chain.
///
/// Only the first MODEL is read. When an atom appears with several altLoc
/// codes the first one in the file is kept. Holes in the residue numbering
/// become residues with sequence 'X' and no atoms, so sequence separation
/// follows the numbering. Chains longer than 300 or shorter than 2 residues
/// are rejected with LengthFilterError.
ProteinRecord parse_pdb_backbone(std::string_view text, char chain, std::string id = "");

ProteinRecord read_pdb_backbone(const std::filesystem::path& path, char chain);

/// ATOM records for every present backbone atom, coordinates with three
/// decimals, terminated by TER/END. parse(write(r)) == r for any parsed r.
std::string write_pdb_backbone(const ProteinRecord& record);

}  // namespace pgnn::protein
