#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pgnn/autodiff/tensor.hpp"

namespace pgnn::eval {

enum class ContactRange { short_range, medium_range, long_range };

inline constexpr ContactRange kRanges[] = {ContactRange::short_range, ContactRange::medium_range,
                                           ContactRange::long_range};
inline constexpr std::size_t kTopKDivisors[] = {10, 5, 2, 1};

std::string to_string(ContactRange range);  // "SR", "MR", "LR"
ContactRange parse_range(const std::string& tag);

/// Sequence separation j - i admitted by a range: SR [6, 11], MR [12, 23], LR [24, inf).
bool in_range(std::size_t separation, ContactRange range);

struct TopKResult {
  std::optional<double> accuracy;  // absent when no pair is eligible
  std::size_t requested = 0;       // floor(L / k)
  std::size_t shortfall = 0;       // requested - selected when too few pairs are eligible
  std::size_t hits = 0;            // selected pairs that are true contacts
  std::vector<std::pair<std::size_t, std::size_t>> selected;  // (i, j), i < j, 0-based
};

/// Top-L/k precision: among unmasked pairs i < j in the range, the floor(L/k)
/// most probable (ties by (i, j) ascending) and the fraction of them whose
/// true distance is below 8 A.
TopKResult contact_accuracy_topk(const ad::Tensor& contact_map, const ad::Tensor& distance,
                                 std::span<const std::uint8_t> mask, ContactRange range,
                                 std::size_t k);

/// min(|a - b|, 360 - |a - b|) after reducing the difference modulo 360.
double wrapped_difference(double a, double b);

/// Mean wrapped difference over unmasked residues; absent when all are masked.
std::optional<double> angle_mae(std::span<const double> predicted, std::span<const double> truth,
                                std::span<const std::uint8_t> mask);

/// Fraction of unmasked pairs i < j where (contact probability > 0.5)
/// agrees with (true distance < 8 A). Absent when no pair is unmasked.
std::optional<double> contact_pair_accuracy(const ad::Tensor& contact_map,
                                            const ad::Tensor& distance,
                                            std::span<const std::uint8_t> mask);

}  // namespace pgnn::eval
