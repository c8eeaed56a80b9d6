#pragma once

#include <random>
#include <string>
#include <vector>

#include "pgnn/protein/record.hpp"

namespace pgnn::protein {

struct SyntheticOptions {
  double torsion_noise_deg = 8.0;     // sd of the Gaussian around the basin centre
  double preferred_basin_prob = 0.85;  // otherwise a uniformly chosen basin
  double min_ca_separation = 4.0;      // self-avoidance for |i - j| >= 3
};

/// Places atom d so that |cd| = bond, angle(b, c, d) = angle_deg and
/// dihedral(a, b, c, d) = torsion_deg.
Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, double bond, double angle_deg,
                double torsion_deg);

/// Random sequence plus a backbone grown residue by residue with ideal bond
/// geometry. Each residue type prefers one torsion basin (helix, strand,
/// polyproline, left-handed); placements whose CA comes within
/// min_ca_separation of an earlier non-neighbour CA are resampled.
/// Coordinates are rounded to 1e-3 A so the record survives a PDB round trip.
ProteinRecord synthetic_protein(const std::string& id, std::size_t length, std::mt19937_64& rng,
                                const SyntheticOptions& options = {});

std::vector<ProteinRecord> synthetic_dataset(std::size_t count, std::size_t min_length,
                                             std::size_t max_length, std::uint64_t seed,
                                             const std::string& id_prefix = "syn");

}  // namespace pgnn::protein
