#include "pgnn/protein/geometry.hpp"

#include <cmath>
#include <numbers>

namespace pgnn::protein {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

constexpr double kDegenerate = 1e-10;

}  // namespace

DistanceMap ca_distance_matrix(const ProteinRecord& rec) {
  const std::size_t n = rec.length();
  DistanceMap out{ad::Tensor({n, n}), std::vector<std::uint8_t>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = rec.backbone[i].ca;
    if (!a) continue;
    out.mask[i * n + i] = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = rec.backbone[j].ca;
      if (!b) continue;
      const double d = norm(sub(*a, *b));
      out.distance(i, j) = out.distance(j, i) = d;
      out.mask[i * n + j] = out.mask[j * n + i] = 1;
    }
  }
  return out;
}

std::optional<double> dihedral_degrees(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                       const Vec3& p3) {
  const Vec3 b1 = sub(p1, p0), b2 = sub(p2, p1), b3 = sub(p3, p2);
  const Vec3 n1 = cross(b1, b2), n2 = cross(b2, b3);
  const double len_b2 = norm(b2);
  if (norm(n1) < kDegenerate || norm(n2) < kDegenerate || len_b2 < kDegenerate) return std::nullopt;
  const Vec3 m1 = cross(n1, {b2[0] / len_b2, b2[1] / len_b2, b2[2] / len_b2});
  double deg = std::atan2(-dot(m1, n2), dot(n1, n2)) * 180.0 / std::numbers::pi;
  // atan2(-0, x<0) gives -180; the range is (-180, 180].
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

BackboneDihedrals backbone_dihedrals(const ProteinRecord& rec) {
  const std::size_t n = rec.length();
  BackboneDihedrals out;
  out.phi.assign(n, 0.0);
  out.psi.assign(n, 0.0);
  out.phi_mask.assign(n, 0);
  out.psi_mask.assign(n, 0);
  const auto& bb = rec.backbone;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && bb[i - 1].c && bb[i].n && bb[i].ca && bb[i].c) {
      if (auto a = dihedral_degrees(*bb[i - 1].c, *bb[i].n, *bb[i].ca, *bb[i].c)) {
        out.phi[i] = *a;
        out.phi_mask[i] = 1;
      } else {
        out.warnings.push_back("phi of residue " + std::to_string(bb[i].seq_number) +
                               " masked: degenerate plane");
      }
    }
    if (i + 1 < n && bb[i].n && bb[i].ca && bb[i].c && bb[i + 1].n) {
      if (auto a = dihedral_degrees(*bb[i].n, *bb[i].ca, *bb[i].c, *bb[i + 1].n)) {
        out.psi[i] = *a;
        out.psi_mask[i] = 1;
      } else {
        out.warnings.push_back("psi of residue " + std::to_string(bb[i].seq_number) +
                               " masked: degenerate plane");
      }
    }
  }
  return out;
}

TargetGeometry derive_targets(const ProteinRecord& rec, const DistanceBinSpec& spec) {
  TargetGeometry t;
  t.length = rec.length();
  auto dm = ca_distance_matrix(rec);
  t.bin_labels = bin_distances(dm.distance, spec);
  t.distance = std::move(dm.distance);
  t.contact_mask = std::move(dm.mask);
  auto dih = backbone_dihedrals(rec);
  t.phi = std::move(dih.phi);
  t.psi = std::move(dih.psi);
  t.phi_mask = std::move(dih.phi_mask);
  t.psi_mask = std::move(dih.psi_mask);
  return t;
}

ProteinRecord transformed(const ProteinRecord& rec, const std::array<Vec3, 3>& rotation,
                          const Vec3& translation) {
  ProteinRecord out = rec;
  auto apply = [&](std::optional<Vec3>& p) {
    if (!p) return;
    const Vec3 x = *p;
    for (int r = 0; r < 3; ++r) (*p)[r] = dot(rotation[r], x) + translation[r];
  };
  for (auto& res : out.backbone) {
    apply(res.n);
    apply(res.ca);
    apply(res.c);
  }
  return out;
}

}  // namespace pgnn::protein
