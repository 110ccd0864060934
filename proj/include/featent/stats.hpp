#pragma once

#include <cmath>
#include <span>

namespace featent {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and population standard deviation. Accumulates offsets from the first
/// value, so a constant sample yields exactly that value and sd 0.
inline MeanSd mean_sd(std::span<const double> xs) {
  if (xs.empty()) return {};
  const double origin = xs.front();
  double shift = 0.0;
  for (double x : xs) shift += x - origin;
  const double mean = origin + shift / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size()))};
}

}  // namespace featent
