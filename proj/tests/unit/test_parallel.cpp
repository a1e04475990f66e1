#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "voxmetric/parallel.hpp"

using namespace voxmetric;

TEST(Parallel, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 2u, 7u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
    EXPECT_EQ(*std::min_element(hits.begin(), hits.end()), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Parallel, RethrowsAfterJoining) {
  std::vector<int> hits(50, 0);
  EXPECT_THROW(parallel_for(hits.size(), 4,
                            [&](std::size_t i) {
                              hits[i] = 1;
                              if (i == 10) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 50);
}

TEST(Parallel, EnvironmentCapsWorkers) {
  ::setenv("VOXMETRIC_MAX_WORKERS", "3", 1);
  EXPECT_EQ(effective_workers(8), 3u);
  EXPECT_EQ(effective_workers(2), 2u);
  ::setenv("VOXMETRIC_MAX_WORKERS", "junk", 1);
  EXPECT_EQ(effective_workers(8), 8u);
  ::unsetenv("VOXMETRIC_MAX_WORKERS");
  EXPECT_GE(effective_workers(0), 1u);
}
