#include "pgnn/protein/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pgnn::protein {

namespace {

constexpr double kNCa = 1.458, kCaC = 1.525, kCN = 1.329;
constexpr double kAngleNCaC = 111.2, kAngleCaCN = 116.2, kAngleCNCa = 121.7;
constexpr const char* kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";

struct Basin {
  double phi, psi;
};
constexpr Basin kBasins[] = {{-63.0, -43.0}, {-120.0, 130.0}, {-75.0, 145.0}, {75.0, 20.0}};

int preferred_basin(char aa) {
  switch (aa) {
    case 'A': case 'E': case 'L': case 'M': case 'Q': case 'K': case 'R': case 'H': return 0;
    case 'V': case 'I': case 'Y': case 'F': case 'W': case 'T': case 'C': return 1;
    case 'P': case 'S': case 'N': case 'D': return 2;
    default: return 3;  // G
  }
}

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 unit(const Vec3& a) {
  const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  return {a[0] / n, a[1] / n, a[2] / n};
}
double dist(const Vec3& a, const Vec3& b) {
  const Vec3 d = sub(a, b);
  return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
}
Vec3 rounded(const Vec3& p) {
  return {std::round(p[0] * 1000.0) / 1000.0, std::round(p[1] * 1000.0) / 1000.0,
          std::round(p[2] * 1000.0) / 1000.0};
}

double wrap(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg <= -180.0) deg += 360.0;
  return deg;
}

}  // namespace

Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, double bond, double angle_deg,
                double torsion_deg) {
  const Vec3 bc = unit(sub(c, b));
  const Vec3 n = unit(cross(sub(b, a), bc));
  const Vec3 m = cross(n, bc);
  const double th = rad(angle_deg), ph = rad(torsion_deg);
  const double d0 = -bond * std::cos(th);
  const double d1 = bond * std::sin(th) * std::cos(ph);
  const double d2 = bond * std::sin(th) * std::sin(ph);
  return {c[0] + d0 * bc[0] + d1 * m[0] + d2 * n[0], c[1] + d0 * bc[1] + d1 * m[1] + d2 * n[1],
          c[2] + d0 * bc[2] + d1 * m[2] + d2 * n[2]};
}

ProteinRecord synthetic_protein(const std::string& id, std::size_t length, std::mt19937_64& rng,
                                const SyntheticOptions& options) {
  if (length < 2) throw std::invalid_argument("synthetic protein needs at least 2 residues");
  std::uniform_int_distribution<int> pick_aa(0, 19);
  std::uniform_int_distribution<int> pick_basin(0, 3);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, options.torsion_noise_deg);

  ProteinRecord rec;
  rec.id = id;
  rec.chain = 'A';
  for (std::size_t i = 0; i < length; ++i) rec.sequence.push_back(kAminoAcids[pick_aa(rng)]);

  auto sample_torsions = [&](std::size_t i) {
    const int basin =
        coin(rng) < options.preferred_basin_prob ? preferred_basin(rec.sequence[i]) : pick_basin(rng);
    return Basin{wrap(kBasins[basin].phi + noise(rng)), wrap(kBasins[basin].psi + noise(rng))};
  };

  std::vector<Vec3> n(length), ca(length), c(length);
  n[0] = {0.0, 0.0, 0.0};
  ca[0] = {kNCa, 0.0, 0.0};
  const double th = rad(180.0 - kAngleNCaC);
  c[0] = {kNCa + kCaC * std::cos(th), kCaC * std::sin(th), 0.0};
  Basin current = sample_torsions(0);
  std::size_t dead_ends = 0;
  for (std::size_t i = 0; i + 1 < length;) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const double psi = attempt == 0 ? current.psi : sample_torsions(i).psi;
      const Basin next = sample_torsions(i + 1);
      n[i + 1] = rounded(place_atom(n[i], ca[i], c[i], kCN, kAngleCaCN, psi));
      ca[i + 1] = rounded(place_atom(ca[i], c[i], n[i + 1], kNCa, kAngleCNCa, 180.0));
      c[i + 1] = rounded(place_atom(c[i], n[i + 1], ca[i + 1], kCaC, kAngleNCaC, next.phi));
      placed = true;
      for (std::size_t k = 0; k + 2 < i + 1 && placed; ++k)
        if (dist(ca[k], ca[i + 1]) < options.min_ca_separation) placed = false;
      if (placed) current = next;
    }
    if (placed) {
      ++i;
      continue;
    }
    // Dead end: back off a few residues and regrow from there. Residue i
    // keeps its placed phi; only its psi is redrawn.
    if (++dead_ends > 100000) throw std::runtime_error("synthetic_protein: could not grow a self-avoiding chain");
    i -= std::min<std::size_t>(i, 1 + rng() % 8);
    current = sample_torsions(i);
  }
  for (std::size_t i = 0; i < length; ++i) {
    BackboneResidue r;
    r.seq_number = static_cast<int>(i) + 1;
    r.name = three_letter_code(rec.sequence[i]);
    r.n = rounded(n[i]);
    r.ca = rounded(ca[i]);
    r.c = rounded(c[i]);
    rec.backbone.push_back(r);
  }
  return rec;
}

std::vector<ProteinRecord> synthetic_dataset(std::size_t count, std::size_t min_length,
                                             std::size_t max_length, std::uint64_t seed,
                                             const std::string& id_prefix) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_len(min_length, max_length);
  std::vector<ProteinRecord> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(synthetic_protein(id_prefix + std::to_string(i), pick_len(rng), rng));
  return out;
}

}  // namespace pgnn::protein
