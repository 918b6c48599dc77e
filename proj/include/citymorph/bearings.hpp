#ifndef CITYMORPH_BEARINGS_HPP
#define CITYMORPH_BEARINGS_HPP

#include <array>
#include <cmath>
#include <cstddef>

#include "citymorph/geometry.hpp"
#include "citymorph/polygon.hpp"

namespace citymorph {

inline constexpr std::size_t kBearingBins = 18;
inline constexpr double kBearingBinWidth = 20.0;
inline constexpr double kDefaultDominantThreshold = 0.10;

struct BearingHistogram {
  std::array<double, kBearingBins> raw{};   // bin k covers [20k, 20k + 20)
  std::array<double, kBearingBins> bins{};  // raw rotated so bins[0] is the maximum
  std::size_t rotation_offset = 0;          // bins[j] == raw[(j + offset) % 18]
  std::size_t dominant_bin_count = 0;       // bins with proportion > threshold
  std::size_t link_count = 0;
};

/// Bin index of a compass bearing. Bearings are snapped to 1e-9 degrees
/// first so values that land on a bin edge up to rounding bin stably.
inline std::size_t bearing_bin(double bearing_deg) {
  double b = std::round(bearing_deg * 1e9) / 1e9;
  b = std::fmod(b, 360.0);
  if (b < 0.0) b += 360.0;
  const auto k = static_cast<std::size_t>(std::floor(b / kBearingBinWidth));
  return k >= kBearingBins ? kBearingBins - 1 : k;
}

/// Rotates `raw` so its maximum (lowest index on ties) comes first and
/// counts dominant bins.
inline BearingHistogram align_histogram(const std::array<double, kBearingBins>& raw,
                                        double dominant_threshold = kDefaultDominantThreshold) {
  BearingHistogram h;
  h.raw = raw;
  std::size_t best = 0;
  for (std::size_t k = 1; k < kBearingBins; ++k)
    if (raw[k] > raw[best]) best = k;
  h.rotation_offset = best;
  for (std::size_t j = 0; j < kBearingBins; ++j) h.bins[j] = raw[(j + best) % kBearingBins];
  for (double v : raw)
    if (v > dominant_threshold) ++h.dominant_bin_count;
  return h;
}

/// Count-weighted histogram of every directed link's initial bearing.
/// Links whose direction is undefined are skipped.
inline BearingHistogram bearing_histogram(const CityNetwork& city,
                                          double dominant_threshold = kDefaultDominantThreshold) {
  std::array<double, kBearingBins> raw{};
  std::size_t counted = 0;
  for (const auto& link : city.graph.links()) {
    try {
      raw[bearing_bin(link_bearing(link, city.graph))] += 1.0;
      ++counted;
    } catch (const DegenerateGeometryError&) {
    }
  }
  if (counted)
    for (auto& v : raw) v /= static_cast<double>(counted);
  BearingHistogram h = align_histogram(raw, dominant_threshold);
  h.link_count = counted;
  return h;
}

}  // namespace citymorph

#endif  // CITYMORPH_BEARINGS_HPP
