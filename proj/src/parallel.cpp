#include "voxmetric/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace voxmetric {

unsigned effective_workers(unsigned requested) {
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("VOXMETRIC_MAX_WORKERS")) {
    unsigned limit = 0;
    const char* end = cap + std::strlen(cap);
    const auto [ptr, ec] = std::from_chars(cap, end, limit);
    if (ec == std::errc() && ptr == end && limit > 0) requested = std::min(requested, limit);
  }
  return requested;
}

}  // namespace voxmetric
