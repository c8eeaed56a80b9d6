#include "pgnn/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pgnn/errors.hpp"
#include "pgnn/protein/bins.hpp"

namespace pgnn::eval {

std::string to_string(ContactRange range) {
  switch (range) {
    case ContactRange::short_range: return "SR";
    case ContactRange::medium_range: return "MR";
    case ContactRange::long_range: return "LR";
  }
  return "?";
}

ContactRange parse_range(const std::string& tag) {
  if (tag == "SR") return ContactRange::short_range;
  if (tag == "MR") return ContactRange::medium_range;
  if (tag == "LR") return ContactRange::long_range;
  throw ValidationError("unknown contact range '" + tag + "'");
}

bool in_range(std::size_t separation, ContactRange range) {
  switch (range) {
    case ContactRange::short_range: return separation >= 6 && separation <= 11;
    case ContactRange::medium_range: return separation >= 12 && separation <= 23;
    case ContactRange::long_range: return separation >= 24;
  }
  return false;
}

namespace {

void check_square(const ad::Tensor& t, std::size_t n, const char* what) {
  if (t.rank() != 2 || t.dim(0) != n || t.dim(1) != n)
    throw DimensionError(std::string(what) + " must be [L x L], got " + ad::shape_str(t.shape()));
}

}  // namespace

TopKResult contact_accuracy_topk(const ad::Tensor& contact_map, const ad::Tensor& distance,
                                 std::span<const std::uint8_t> mask, ContactRange range,
                                 std::size_t k) {
  if (k != 10 && k != 5 && k != 2 && k != 1)
    throw ValidationError("top-L/k needs k in {10, 5, 2, 1}, got " + std::to_string(k));
  const std::size_t n = contact_map.rank() == 2 ? contact_map.dim(0) : 0;
  check_square(contact_map, n, "contact map");
  check_square(distance, n, "distance map");
  if (mask.size() != n * n) throw DimensionError("contact mask needs L*L entries");

  struct Candidate {
    double p;
    std::size_t i, j;
  };
  std::vector<Candidate> eligible;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (mask[i * n + j] && in_range(j - i, range)) eligible.push_back({contact_map(i, j), i, j});

  TopKResult r;
  r.requested = n / k;
  if (eligible.empty()) return r;
  const std::size_t take = std::min(r.requested, eligible.size());
  r.shortfall = r.requested - take;
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.p != b.p) return a.p > b.p;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<long>(take), eligible.end(),
                    better);
  std::size_t& hits = r.hits;
  for (std::size_t t = 0; t < take; ++t) {
    r.selected.emplace_back(eligible[t].i, eligible[t].j);
    hits += distance(eligible[t].i, eligible[t].j) < protein::kContactThreshold;
  }
  // floor(L/k) can be zero for very short chains; nothing selected then.
  if (take > 0) r.accuracy = static_cast<double>(hits) / static_cast<double>(take);
  return r;
}

double wrapped_difference(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

std::optional<double> angle_mae(std::span<const double> predicted, std::span<const double> truth,
                                std::span<const std::uint8_t> mask) {
  if (predicted.size() != truth.size() || mask.size() != truth.size())
    throw DimensionError("angle_mae: predicted, truth and mask lengths differ");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    total += wrapped_difference(predicted[i], truth[i]);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

std::optional<double> contact_pair_accuracy(const ad::Tensor& contact_map,
                                            const ad::Tensor& distance,
                                            std::span<const std::uint8_t> mask) {
  const std::size_t n = contact_map.rank() == 2 ? contact_map.dim(0) : 0;
  check_square(contact_map, n, "contact map");
  check_square(distance, n, "distance map");
  if (mask.size() != n * n) throw DimensionError("contact mask needs L*L entries");
  std::size_t agree = 0, count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!mask[i * n + j]) continue;
      const bool predicted = contact_map(i, j) > 0.5;
      const bool truth = distance(i, j) < protein::kContactThreshold;
      agree += predicted == truth;
      ++count;
    }
  if (count == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(count);
}

}  // namespace pgnn::eval
