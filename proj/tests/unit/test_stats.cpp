#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "voxmetric/special.hpp"
#include "voxmetric/stats.hpp"

using namespace voxmetric;
using oracle::kind_of;

namespace {

using G = std::vector<std::vector<double>>;

// H from the textbook definition with explicit mid-ranks.
double brute_h(const G& groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const double n = static_cast<double>(pooled.size());
  auto rank = [&](double v) {
    double below = 0, equal = 0;
    for (double p : pooled) {
      below += p < v;
      equal += p == v;
    }
    return below + (equal + 1) / 2;
  };
  double sum = 0, ties = 0;
  for (const auto& g : groups) {
    double r = 0;
    for (double v : g) r += rank(v);
    sum += r * r / static_cast<double>(g.size());
  }
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  return (12 / (n * (n + 1)) * sum - 3 * (n + 1)) / (1 - ties / (n * n * n - n));
}

}  // namespace

TEST(Summarize, Examples) {
  const Summary one = summarize(std::vector<double>{5});
  EXPECT_EQ(one.median, 5);
  EXPECT_EQ(one.min, 5);
  EXPECT_EQ(one.max, 5);
  const Summary four = summarize(std::vector<double>{4, 1, 3, 2});
  EXPECT_EQ(four.median, 2.5);
  EXPECT_EQ(four.q1, 1.75);
  EXPECT_EQ(four.q3, 3.25);
  EXPECT_EQ(four.n, 4u);
  EXPECT_EQ(kind_of([] { summarize(std::vector<double>{}); }), ErrorKind::EmptyInput);
}

TEST(KruskalWallis, Examples) {
  const G g{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const TestResult r = kruskal_wallis(g);
  EXPECT_EQ(r.kind, TestKind::KruskalWallis);
  EXPECT_NEAR(r.statistic, 7.2, 1e-12);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p_value, std::exp(-3.6), 1e-9);

  const TestResult close = kruskal_wallis(G{{1, 3}, {2, 4}});
  EXPECT_LT(close.statistic, 1.0);
  EXPECT_GT(close.p_value, 0.05);

  G cubed = g;
  for (auto& grp : cubed)
    for (double& v : grp) v = v * v * v;
  const TestResult c = kruskal_wallis(cubed);
  EXPECT_EQ(c.statistic, r.statistic);
  EXPECT_EQ(c.p_value, r.p_value);
}

TEST(KruskalWallis, Errors) {
  EXPECT_EQ(kind_of([] { kruskal_wallis(G{{2, 2}, {2}}); }), ErrorKind::DegenerateData);
  EXPECT_EQ(kind_of([] { kruskal_wallis(G{{1, 2}}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { kruskal_wallis(G{{1, 2}, {}}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { kruskal_wallis(G{{1}, {2}}); }), ErrorKind::InvalidArgument);
}

TEST(KruskalWallis, MatchesDefinitionWithTies) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    G groups(2 + rng() % 4);
    for (auto& grp : groups) {
      grp.resize(1 + rng() % 8);
      for (double& v : grp) v = static_cast<double>(rng() % 6);  // many ties
    }
    double lo = 1e9, hi = -1e9;
    for (const auto& grp : groups)
      for (double v : grp) lo = std::min(lo, v), hi = std::max(hi, v);
    std::size_t total = 0;
    for (const auto& grp : groups) total += grp.size();
    if (lo == hi || total < 3) continue;
    const TestResult r = kruskal_wallis(groups);
    EXPECT_NEAR(r.statistic, brute_h(groups), 1e-10);
    EXPECT_NEAR(r.p_value, special::chi2_survival(brute_h(groups), static_cast<double>(groups.size() - 1)), 1e-12);
  }
}

TEST(Dunn, Examples) {
  const auto pairs = dunn_posthoc(G{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[1].pair, (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_NEAR(pairs[1].z, -6 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(pairs[1].p_raw, 0.0072903, 1e-6);
  EXPECT_NEAR(pairs[1].p_raw, 2 * special::normal_survival(6 / std::sqrt(5.0)), 1e-15);
  for (const auto& p : pairs) {
    EXPECT_GE(p.p_adjusted, p.p_raw);
    EXPECT_LE(p.p_adjusted, 1.0);
  }

  const auto same = dunn_posthoc(G{{1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(same[0].z, 0.0);
  EXPECT_EQ(same[0].p_raw, 1.0);

  const auto ab = dunn_posthoc(G{{1, 5, 2}, {7, 3, 9, 8}});
  const auto ba = dunn_posthoc(G{{7, 3, 9, 8}, {1, 5, 2}});
  EXPECT_EQ(ab[0].z, -ba[0].z);
  EXPECT_EQ(ab[0].p_raw, ba[0].p_raw);
}

TEST(Holm, Examples) {
  const auto r = holm_adjust(std::vector<double>{0.01, 0.04, 0.03});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 0.03, 1e-15);
  EXPECT_NEAR(r[1], 0.06, 1e-15);
  EXPECT_NEAR(r[2], 0.06, 1e-15);
  EXPECT_EQ(holm_adjust(std::vector<double>{0.2}), std::vector<double>{0.2});
  EXPECT_EQ(holm_adjust(std::vector<double>{0.9, 0.9, 0.9}), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(kind_of([] { holm_adjust(std::vector<double>{1.5}); }), ErrorKind::DomainError);
}

TEST(Holm, Properties) {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(0, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(1 + rng() % 10);
    for (double& v : p) v = u(rng);
    const auto adj = holm_adjust(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_GE(adj[i], p[i]);
      EXPECT_LE(adj[i], 1.0);
      for (std::size_t j = 0; j < p.size(); ++j)
        if (p[i] < p[j]) EXPECT_LE(adj[i], adj[j]);
    }
  }
}

TEST(PairedT, Examples) {
  const std::vector<double> a{1, 2, 3}, zero{0, 0, 0};
  const TestResult r = paired_t(a, zero);
  const double t = 2 * std::sqrt(3.0);
  EXPECT_NEAR(r.statistic, t, 1e-12);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p_value, 1 - t / std::sqrt(2 + t * t), 1e-9);

  const std::vector<double> b{0.1, 0.7, 0.35, 0.9}, shifted{0.1 + 0.25, 0.7 + 0.25, 0.35 + 0.25, 0.9 + 0.25};
  EXPECT_EQ(kind_of([&] { paired_t(shifted, b); }), ErrorKind::DegenerateData);

  const std::vector<double> x{3.1, 2.7, 5.5, 4.0}, y{2.0, 2.9, 4.1, 3.3};
  std::vector<double> xs = x, ys = y;
  for (double& v : xs) v += 100;
  for (double& v : ys) v += 100;
  const TestResult base = paired_t(x, y), moved = paired_t(xs, ys), swapped = paired_t(y, x);
  EXPECT_NEAR(moved.statistic, base.statistic, 1e-9);
  EXPECT_NEAR(moved.p_value, base.p_value, 1e-9);
  EXPECT_EQ(swapped.statistic, -base.statistic);
  EXPECT_EQ(swapped.p_value, base.p_value);
  EXPECT_EQ(kind_of([&] { paired_t(x, a); }), ErrorKind::InvalidArgument);
}
