#pragma once

// Ensemble statistics: mean, sample standard deviation and standard error
// (sample SD / sqrt(M)).

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace rotex {

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // Two-pass for accuracy; inputs are small.
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (xs.size() - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

inline SampleStats sample_stats(const std::vector<double>& xs) { return sample_stats(std::span<const double>(xs)); }

struct Comparison {
  double observed = 0.0;
  double predicted = 0.0;
  double se = 0.0;

  double error() const { return std::abs(observed - predicted); }
  double z() const {
    if (se > 0.0) return (observed - predicted) / se;
    return observed == predicted ? 0.0 : std::numeric_limits<double>::infinity();
  }
  // |observed - predicted| <= max(sigmas * SE, floor)
  bool within(double sigmas, double floor) const { return error() <= std::max(sigmas * se, floor); }
};

}  // namespace rotex
