#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace voxmetric {

/// Five-number summary; quartiles use the linear-interpolation percentile.
struct Summary {
  std::size_t n = 0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;

  bool operator==(const Summary&) const = default;
};

enum class TestKind { KruskalWallis, DunnPairwise, PairedT };

std::string_view to_string(TestKind kind) noexcept;

struct TestResult {
  TestKind kind = TestKind::KruskalWallis;
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;

  bool operator==(const TestResult&) const = default;
};

/// Dunn comparison of groups `pair.first` and `pair.second` (indices into the input).
struct PairwiseResult {
  std::pair<std::size_t, std::size_t> pair;
  double z = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;

  bool operator==(const PairwiseResult&) const = default;
};

using Groups = std::span<const std::vector<double>>;

/// Throws EmptyInput for an empty sequence.
Summary summarize(std::span<const double> values);

/// Mid-rank Kruskal-Wallis H with tie correction; p from chi-square(k - 1).
/// Throws DegenerateData when every pooled value is identical and
/// InvalidArgument for fewer than two groups, an empty group, or N < 3.
TestResult kruskal_wallis(Groups groups);

/// Dunn's pairwise z-tests (tie-corrected), two-sided, Holm-adjusted over all
/// k(k-1)/2 pairs in the order (0,1), (0,2), ..., (k-2,k-1).
std::vector<PairwiseResult> dunn_posthoc(Groups groups);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

/// Two-sided paired t-test on a - b. Throws DegenerateData when the
/// differences have zero spread.
TestResult paired_t(std::span<const double> a, std::span<const double> b);

}  // namespace voxmetric
