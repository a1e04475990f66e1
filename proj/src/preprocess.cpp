#include "voxmetric/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "voxmetric/error.hpp"
#include "voxmetric/percentile.hpp"
#include "voxmetric/simd.hpp"

namespace voxmetric {

Volume window_lut(const Volume& volume, const WindowSpec& window) {
  if (volume.unit() != IntensityUnit::HU)
    throw Error(ErrorKind::InvalidArgument, "window_lut expects a volume in HU");
  if (!(window.lo < window.hi)) throw Error(ErrorKind::InvalidArgument, "window needs lo < hi");
  std::vector<std::uint8_t> out(volume.geometry().voxel_count());
  const auto& k = simd::kernels();
  if (volume.kind() == ElementKind::Int16) {
    auto v = volume.values<std::int16_t>();
    k.window_i16(v.data(), v.size(), window.lo, window.hi, out.data());
  } else {
    auto v = volume.values<float>();
    k.window_f32(v.data(), v.size(), window.lo, window.hi, out.data());
  }
  return Volume(volume.geometry(), std::move(out), IntensityUnit::Display8Bit);
}

NormStats foreground_stats(std::span<const Volume> volumes, std::span<const BinaryMask> masks) {
  if (volumes.size() != masks.size())
    throw Error(ErrorKind::InvalidArgument, "volumes and masks differ in count");
  std::vector<double> samples;
  for (std::size_t c = 0; c < volumes.size(); ++c) {
    require_compatible(volumes[c].geometry(), masks[c].geometry(), "foreground_stats case");
    const auto bits = masks[c].bits();
    std::visit(
        [&](const auto& values) {
          for (std::size_t i = 0; i < values.size(); ++i)
            if (bits[i]) samples.push_back(static_cast<double>(values[i]));
        },
        volumes[c].storage());
  }
  if (samples.empty()) throw Error(ErrorKind::EmptyForeground, "no foreground voxels in any case");

  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : samples) sq += (v - mean) * (v - mean);

  NormStats stats;
  stats.mean = mean;
  stats.stddev = std::sqrt(sq / n);
  stats.p_low = percentile_sorted(samples, 0.005);
  stats.p_high = percentile_sorted(samples, 0.995);
  stats.sample_count = samples.size();
  return stats;
}

Volume normalize(const Volume& volume, const NormStats& stats) {
  if (!(stats.stddev > 0.0))
    throw Error(ErrorKind::DegenerateStats, "standard deviation is zero");
  std::vector<float> out(volume.geometry().voxel_count());
  const auto& k = simd::kernels();
  switch (volume.kind()) {
    case ElementKind::UInt8: {
      auto v = volume.values<std::uint8_t>();
      k.normalize_u8(v.data(), v.size(), stats.p_low, stats.p_high, stats.mean, stats.stddev, out.data());
      break;
    }
    case ElementKind::Int16: {
      auto v = volume.values<std::int16_t>();
      k.normalize_i16(v.data(), v.size(), stats.p_low, stats.p_high, stats.mean, stats.stddev, out.data());
      break;
    }
    case ElementKind::Float32: {
      auto v = volume.values<float>();
      k.normalize_f32(v.data(), v.size(), stats.p_low, stats.p_high, stats.mean, stats.stddev, out.data());
      break;
    }
  }
  return Volume(volume.geometry(), std::move(out), IntensityUnit::Normalized);
}

}  // namespace voxmetric
