#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "pgnn/errors.hpp"
#include "pgnn/eval/metrics.hpp"
#include "pgnn/eval/report.hpp"
#include "pgnn/protein/bins.hpp"
#include "pgnn/protein/geometry.hpp"
#include "pgnn/protein/synthetic.hpp"

using namespace pgnn;
using namespace pgnn::eval;
using ad::Tensor;

namespace {

// Symmetric random distance matrix with roughly a third of the pairs below 8 A.
Tensor random_distance(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(3.0, 20.0);
  Tensor d({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
  return d;
}

Tensor random_contact(std::size_t n, std::mt19937_64& rng, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor c({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      c(i, j) = c(j, i) = coarse ? std::floor(u(rng) * 4) / 4 : u(rng);  // coarse forces ties
  return c;
}

std::pair<std::size_t, std::size_t> bounds(ContactRange r) {
  switch (r) {
    case ContactRange::short_range: return {6, 11};
    case ContactRange::medium_range: return {12, 23};
    default: return {24, 1u << 30};
  }
}

}  // namespace

TEST_CASE("range bounds") {
  CHECK_FALSE(in_range(5, ContactRange::short_range));
  CHECK(in_range(6, ContactRange::short_range));
  CHECK(in_range(11, ContactRange::short_range));
  CHECK(in_range(12, ContactRange::medium_range));
  CHECK(in_range(23, ContactRange::medium_range));
  CHECK(in_range(24, ContactRange::long_range));
  CHECK(in_range(500, ContactRange::long_range));
  CHECK(parse_range("LR") == ContactRange::long_range);
  CHECK(to_string(ContactRange::medium_range) == "MR");
}

TEST_CASE("correct predictions by construction give ACC 1") {
  std::mt19937_64 rng(1);
  const std::size_t n = 40;
  const Tensor d = random_distance(n, rng);
  Tensor c({n, n});
  for (std::size_t i = 0; i < n * n; ++i) c[i] = d[i] < 8.0 ? 0.9 : 0.1;
  const std::vector<std::uint8_t> mask(n * n, 1);
  for (auto r : kRanges) {
    const auto res = contact_accuracy_topk(c, d, mask, r, 10);
    // enough true contacts exist in every range for L/10 = 4
    REQUIRE(res.accuracy.has_value());
    CHECK(*res.accuracy == 1.0);
  }
}

TEST_CASE("L = 10, k = 5 selects exactly 2 pairs") {
  std::mt19937_64 rng(2);
  const Tensor d = random_distance(10, rng), c = random_contact(10, rng, false);
  const auto res = contact_accuracy_topk(c, d, std::vector<std::uint8_t>(100, 1), ContactRange::short_range, 5);
  CHECK(res.requested == 2);
  CHECK(res.selected.size() == 2);
  CHECK(res.shortfall == 0);
}

TEST_CASE("shortfall and absent metric") {
  std::mt19937_64 rng(3);
  const Tensor d = random_distance(30, rng), c = random_contact(30, rng, false);
  const std::vector<std::uint8_t> mask(900, 1);
  const auto lr = contact_accuracy_topk(c, d, mask, ContactRange::long_range, 1);
  // separations 24..29 give 6+5+4+3+2+1 = 21 pairs, fewer than 30
  CHECK(lr.selected.size() == 21);
  CHECK(lr.shortfall == 9);
  const Tensor ds = random_distance(20, rng), cs = random_contact(20, rng, false);
  const auto absent = contact_accuracy_topk(cs, ds, std::vector<std::uint8_t>(400, 1), ContactRange::long_range, 2);
  CHECK_FALSE(absent.accuracy.has_value());
  CHECK_THROWS_AS(contact_accuracy_topk(cs, ds, std::vector<std::uint8_t>(400, 1), ContactRange::long_range, 3),
                  ValidationError);
}

TEST_CASE("top-k selection equals the full-sort oracle on 100 random instances") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng() % 50;
    const Tensor d = random_distance(n, rng), c = random_contact(n, rng, trial % 2 == 0);
    std::vector<std::uint8_t> mask(n * n);
    for (auto& m : mask) m = rng() % 10 != 0;
    const auto r = kRanges[trial % 3];
    const std::size_t k = kTopKDivisors[trial % 4];
    const auto got = contact_accuracy_topk(c, d, mask, r, k);
    const auto [lo, hi] = bounds(r);
    const auto want = oracle::topk_pairs(c, mask, lo, hi, k);
    CHECK(got.selected == want);
    if (!want.empty()) {
      std::size_t hits = 0;
      for (auto [i, j] : want) hits += d(i, j) < 8.0;
      CHECK(*got.accuracy == static_cast<double>(hits) / static_cast<double>(want.size()));
    }
  }
}

TEST_CASE("angle MAE wraps around") {
  const std::vector<double> p{179.0}, t{-179.0};
  const std::vector<std::uint8_t> on{1};
  CHECK(*angle_mae(p, t, on) == doctest::Approx(2.0));
  CHECK(*angle_mae(t, t, on) == 0.0);
  CHECK_FALSE(angle_mae(p, t, std::vector<std::uint8_t>{0}).has_value());
  CHECK(wrapped_difference(10, 370) == doctest::Approx(0.0));
  CHECK(wrapped_difference(-170, 170) == doctest::Approx(20.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-180, 180);
  for (int t2 = 0; t2 < 200; ++t2) {
    const double a = u(rng), b = u(rng);
    CHECK(wrapped_difference(a, b) == doctest::Approx(wrapped_difference(b, a)).epsilon(1e-12));
    CHECK(wrapped_difference(a + 360, b) == doctest::Approx(wrapped_difference(a, b)).epsilon(1e-9));
    CHECK(wrapped_difference(a, b) <= 180.0);
  }
}

TEST_CASE("angle MAE of uniform random predictions approaches 90 degrees") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-180, 180);
  std::vector<double> p(100000), t(100000);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = u(rng), t[i] = u(rng);
  const double mae = *angle_mae(p, t, std::vector<std::uint8_t>(p.size(), 1));
  CHECK(std::abs(mae - 90.0) <= 1.0);
}

TEST_CASE("contact pair accuracy counts upper-triangle agreement") {
  const Tensor d({3, 3}, {0, 5, 9, 5, 0, 12, 9, 12, 0});
  const Tensor c({3, 3}, {0, 0.9, 0.7, 0.9, 0, 0.2, 0.7, 0.2, 0});
  CHECK(*contact_pair_accuracy(c, d, std::vector<std::uint8_t>(9, 1)) == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(contact_pair_accuracy(c, d, std::vector<std::uint8_t>(9, 0)).has_value());
}

TEST_CASE("one-protein dataset means equal that protein, ERR = 1 - ACC everywhere") {
  std::mt19937_64 rng(7);
  const auto rec = protein::synthetic_protein("x", 35, rng);
  const auto truth = protein::derive_targets(rec, protein::DistanceBinSpec::binary());
  const Tensor c = random_contact(35, rng, false);
  std::vector<double> phi(35), psi(35);
  std::uniform_real_distribution<double> u(-180, 180);
  for (std::size_t i = 0; i < 35; ++i) phi[i] = u(rng), psi[i] = u(rng);
  const auto pm = protein_metrics("x", c, phi, psi, truth);
  const auto ds = aggregate({pm}, Aggregation::protein_mean);
  CHECK(ds.proteins == 1);
  CHECK(ds.topk == pm.topk);
  CHECK(ds.mae_phi == pm.mae_phi);
  CHECK(ds.mae_psi == pm.mae_psi);
  for (const auto& row : pm.topk)
    for (const auto& cell : row) {
      CHECK(cell.acc.has_value() == cell.err.has_value());
      if (cell.acc) CHECK(*cell.err == 1.0 - *cell.acc);
    }
}

TEST_CASE("protein mean and pair pooling differ as defined") {
  ProteinMetrics a, b;
  a.id = "a", b.id = "b";
  a.topk[2][0] = {1.0, 0.0, 1, 1, 0};
  b.topk[2][0] = {0.25, 0.75, 4, 1, 0};
  a.mae_phi = 10.0, a.phi_count = 1;
  b.mae_phi = 40.0, b.phi_count = 3;
  const auto mean = aggregate({a, b}, Aggregation::protein_mean);
  CHECK(*mean.topk[2][0].acc == doctest::Approx(0.625));
  CHECK(*mean.mae_phi == doctest::Approx(25.0));
  const auto pooled = aggregate({a, b}, Aggregation::pair_pooled);
  CHECK(*pooled.topk[2][0].acc == doctest::Approx(0.4));
  CHECK(*pooled.mae_phi == doctest::Approx(32.5));
  CHECK(*pooled.topk[2][0].err == 1.0 - *pooled.topk[2][0].acc);
  CHECK_FALSE(mean.topk[0][0].acc.has_value());
}

TEST_CASE("report JSON round-trips") {
  std::mt19937_64 rng(8);
  MetricsReport r;
  r.version = library_version();
  r.split = "test";
  r.config = {{"lambda", 0.5}};
  for (int p = 0; p < 3; ++p) {
    const auto rec = protein::synthetic_protein("p" + std::to_string(p), 30 + p, rng);
    const auto truth = protein::derive_targets(rec, protein::DistanceBinSpec::binary());
    std::vector<double> phi(rec.length(), 12.345678901234567), psi(rec.length(), -0.1);
    r.proteins.push_back(protein_metrics(rec.id, random_contact(rec.length(), rng, false), phi, psi, truth));
  }
  r.exclusions.push_back({"bad", "no residues"});
  r.dataset = aggregate(r.proteins, r.aggregation);
  CHECK(parse_report(render_report(r)) == r);
  const std::string table = render_protein_table(r);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
}
