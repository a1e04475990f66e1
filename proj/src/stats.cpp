#include "voxmetric/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "voxmetric/error.hpp"
#include "voxmetric/percentile.hpp"
#include "voxmetric/special.hpp"

namespace voxmetric {
namespace {

struct RankedPool {
  std::vector<double> rank_sums;   // per group
  std::vector<std::size_t> sizes;  // per group
  std::size_t total = 0;
  double tie_term = 0.0;  // sum over tie runs of t^3 - t
};

RankedPool rank_groups(Groups groups) {
  if (groups.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two groups");
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw Error(ErrorKind::InvalidArgument, "group " + std::to_string(g) + " is empty");
    for (double v : groups[g]) {
      if (std::isnan(v)) throw Error(ErrorKind::InvalidArgument, "NaN in group " + std::to_string(g));
      pooled.emplace_back(v, g);
    }
  }
  std::sort(pooled.begin(), pooled.end());
  if (pooled.front().first == pooled.back().first)
    throw Error(ErrorKind::DegenerateData, "all pooled values are identical");
  if (pooled.size() < 3) throw Error(ErrorKind::InvalidArgument, "need at least three observations");

  RankedPool out;
  out.rank_sums.assign(groups.size(), 0.0);
  out.sizes.assign(groups.size(), 0);
  out.total = pooled.size();
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    for (std::size_t m = i; m < j; ++m) {
      out.rank_sums[pooled[m].second] += mid_rank;
      ++out.sizes[pooled[m].second];
    }
    i = j;
  }
  return out;
}

}  // namespace

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::KruskalWallis: return "kruskal-wallis";
    case TestKind::DunnPairwise: return "dunn-pairwise";
    case TestKind::PairedT: return "paired-t";
  }
  return "unknown";
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "cannot summarize zero values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted.size(),
          percentile_sorted(sorted, 0.5),
          sorted.front(),
          sorted.back(),
          percentile_sorted(sorted, 0.25),
          percentile_sorted(sorted, 0.75)};
}

TestResult kruskal_wallis(Groups groups) {
  const RankedPool pool = rank_groups(groups);
  const auto n = static_cast<double>(pool.total);
  double weighted = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    weighted += pool.rank_sums[g] * pool.rank_sums[g] / static_cast<double>(pool.sizes[g]);
  const double h_raw = 12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0);
  const double correction = 1.0 - pool.tie_term / (n * n * n - n);
  const double h = std::max(0.0, h_raw / correction);
  const double df = static_cast<double>(groups.size() - 1);
  return {TestKind::KruskalWallis, h, df, special::chi2_survival(h, df)};
}

std::vector<PairwiseResult> dunn_posthoc(Groups groups) {
  const RankedPool pool = rank_groups(groups);
  const auto n = static_cast<double>(pool.total);
  const double variance = n * (n + 1.0) / 12.0 - pool.tie_term / (12.0 * (n - 1.0));
  if (!(variance > 0.0)) throw Error(ErrorKind::DegenerateData, "zero rank variance");

  std::vector<PairwiseResult> out;
  std::vector<double> raw;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const double ni = static_cast<double>(pool.sizes[i]);
      const double nj = static_cast<double>(pool.sizes[j]);
      const double diff = pool.rank_sums[i] / ni - pool.rank_sums[j] / nj;
      const double z = diff / std::sqrt(variance * (1.0 / ni + 1.0 / nj));
      const double p = std::min(1.0, 2.0 * special::normal_survival(std::abs(z)));
      out.push_back({{i, j}, z, p, p});
      raw.push_back(p);
    }
  }
  const std::vector<double> adjusted = holm_adjust(raw);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].p_adjusted = adjusted[k];
  return out;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "p-values must lie in [0, 1]");
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled = static_cast<double>(m - k) * p_values[order[k]];
    running = std::max(running, std::min(1.0, scaled));
    adjusted[order[k]] = running;
  }
  return adjusted;
}

TestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "paired samples differ in length");
  if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "paired t-test needs n >= 2");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  // a = b + c computed in floating point leaves ulp-level scatter in d.
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  if (!(sd > 64.0 * std::numeric_limits<double>::epsilon() * scale))
    throw Error(ErrorKind::DegenerateData, "paired differences have zero spread");
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double df = static_cast<double>(n - 1);
  const double p = std::min(1.0, 2.0 * special::student_t_survival(std::abs(t), df));
  return {TestKind::PairedT, t, df, p};
}

}  // namespace voxmetric
