#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featent/activation.hpp"
#include "featent/error.hpp"
#include "featent/homology.hpp"

namespace featent {

/// Histogram of birth ranks over a class's samples. Samples without a birth
/// time count toward sample_count only.
struct BirthDistribution {
  std::map<std::size_t, std::size_t> counts;
  std::size_t defined_count = 0;
  std::size_t sample_count = 0;

  double selective_rate() const noexcept {
    return sample_count == 0 ? 0.0 : static_cast<double>(defined_count) / static_cast<double>(sample_count);
  }

  friend bool operator==(const BirthDistribution&, const BirthDistribution&) = default;
};

inline BirthDistribution distribution_from(std::span<const std::optional<std::size_t>> features) {
  BirthDistribution d;
  d.sample_count = features.size();
  for (const auto& f : features) {
    if (f) {
      ++d.counts[*f];
      ++d.defined_count;
    }
  }
  return d;
}

inline BirthDistribution distribution_from(std::span<const BirthTime> births) {
  BirthDistribution d;
  d.sample_count = births.size();
  for (const auto& b : births) {
    if (b.defined) {
      ++d.counts[b.rank];
      ++d.defined_count;
    }
  }
  return d;
}

inline std::vector<BirthTime> stack_birth_times(const ClassUnitStack& stack, int k) {
  std::vector<BirthTime> births;
  births.reserve(stack.sample_count());
  for (const auto& unit : stack.units()) births.push_back(birth_time(unit, k));
  return births;
}

inline BirthDistribution birth_distribution(const ClassUnitStack& stack, int k) {
  require_supported_degree(k);
  const auto births = stack_birth_times(stack, k);
  return distribution_from(std::span<const BirthTime>(births));
}

/// Distribution of an arbitrary Betti-curve characterization.
inline BirthDistribution feature_distribution(const ClassUnitStack& stack, int k, CurveFeature feature) {
  require_supported_degree(k);
  std::vector<std::optional<std::size_t>> values;
  values.reserve(stack.sample_count());
  for (const auto& unit : stack.units()) values.push_back(characterize(build_filtration(unit), k, feature));
  return distribution_from(std::span<const std::optional<std::size_t>>(values));
}

inline double selective_rate(const BirthDistribution& dist) noexcept { return dist.selective_rate(); }

enum class LogBase { natural, two };

struct EntropyOptions {
  /// Selective rates below this use the (1 - eps) log N substitute.
  double threshold = 0.1;
  LogBase base = LogBase::natural;
};

inline double log_in(double x, LogBase base) noexcept { return base == LogBase::two ? std::log2(x) : std::log(x); }

/// Entropy of the birth distribution, normalized over samples that have a
/// birth time. When the selective rate eps falls below the threshold p the
/// unit is scored (1 - eps) log N instead. Always within [0, log N].
inline double feature_entropy(const BirthDistribution& dist, const EntropyOptions& options = {}) {
  if (dist.sample_count == 0) throw ValidationError("feature entropy needs at least one sample");
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) throw ValidationError("threshold p must lie in (0, 1)");

  const double eps = dist.selective_rate();
  if (eps < options.threshold) {
    return (1.0 - eps) * log_in(static_cast<double>(dist.sample_count), options.base);
  }
  const auto defined = static_cast<double>(dist.defined_count);
  double h = 0.0;
  for (const auto& [rank, count] : dist.counts) {
    const double q = static_cast<double>(count) / defined;
    h -= q * log_in(q, options.base);
  }
  // Rounding can push a uniform histogram a hair past log(support).
  return std::clamp(h, 0.0, log_in(defined, options.base));
}

/// Mean over samples of each unit's absolute entry sum.
inline double l1_norm(const ClassUnitStack& stack) {
  double total = 0.0;
  for (const auto& unit : stack.units()) {
    double sum = 0.0;
    for (double v : unit.values()) sum += std::abs(v);
    total += sum;
  }
  return total / static_cast<double>(stack.sample_count());
}

/// Fraction of zero entries over all samples and positions.
inline double apoz(const ClassUnitStack& stack) {
  std::size_t zeros = 0;
  std::size_t cells = 0;
  for (const auto& unit : stack.units()) {
    for (double v : unit.values()) zeros += (v == 0.0);
    cells += unit.values().size();
  }
  return static_cast<double>(zeros) / static_cast<double>(cells);
}

/// Mean activation over samples and positions; the per-class input of
/// class_selectivity.
inline double mean_activation(const ClassUnitStack& stack) {
  const double per_unit = l1_norm(stack);
  return per_unit / static_cast<double>(stack.side() * stack.side());
}

/// (mu_max - mu_rest) / (mu_max + mu_rest), where mu_max is the largest
/// class-conditional mean and mu_rest the mean of the others.
inline double class_selectivity(const std::map<std::string, double>& per_class_means) {
  if (per_class_means.size() < 2) throw ValidationError("class selectivity needs at least two classes");
  auto top = per_class_means.begin();
  for (auto it = per_class_means.begin(); it != per_class_means.end(); ++it) {
    if (it->second < 0.0) throw ValidationError("class means must be non-negative");
    if (it->second > top->second) top = it;
  }
  double rest = 0.0;
  for (auto it = per_class_means.begin(); it != per_class_means.end(); ++it) {
    if (it != top) rest += it->second;
  }
  rest /= static_cast<double>(per_class_means.size() - 1);
  const double denom = top->second + rest;
  return denom == 0.0 ? 0.0 : (top->second - rest) / denom;
}

/// Sum of Euclidean distances from each filter to every filter.
inline std::vector<double> fpgm_scores(const std::vector<std::vector<double>>& filters) {
  if (filters.size() < 2) throw ValidationError("FPGM needs at least two filters");
  const std::size_t dim = filters.front().size();
  for (const auto& f : filters) {
    if (f.size() != dim) throw ValidationError("FPGM filters must share one dimension");
  }
  const std::size_t n = filters.size();
  std::vector<double> distance(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = filters[i][d] - filters[j][d];
        sq += diff * diff;
      }
      distance[i * n + j] = distance[j * n + i] = std::sqrt(sq);
    }
  }
  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) scores[i] += distance[i * n + j];
  }
  return scores;
}

/// s_i = sum_j |W_ij| s_next_j, with W shaped (units here) x (units in the
/// next layer).
inline std::vector<double> nisp_backprop(const std::vector<std::vector<double>>& weights,
                                         std::span<const double> next_scores) {
  for (double s : next_scores) {
    if (!(s >= 0.0)) throw ValidationError("NISP next-layer scores must be non-negative");
  }
  std::vector<double> scores;
  scores.reserve(weights.size());
  for (const auto& row : weights) {
    if (row.size() != next_scores.size()) throw ValidationError("NISP weight row does not match next-layer scores");
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += std::abs(row[j]) * next_scores[j];
    scores.push_back(s);
  }
  return scores;
}

struct IndicatorReport {
  double feature_entropy = 0.0;
  double selective_rate = 0.0;
  double l1_norm = 0.0;
  double apoz = 0.0;
  std::optional<double> class_selectivity;
  std::optional<double> fpgm;
  std::optional<double> nisp;
};

/// Optional inputs for the indicators that need more than the stack itself.
/// FPGM and NISP scores are read at the stack's channel index.
struct UnitContext {
  std::optional<std::map<std::string, double>> class_means;
  std::optional<std::vector<std::vector<double>>> filters;
  std::optional<std::vector<std::vector<double>>> nisp_weights;
  std::optional<std::vector<double>> nisp_next_scores;
};

inline IndicatorReport unit_report(const ClassUnitStack& stack, int k, const EntropyOptions& options = {},
                                   const UnitContext& context = {}) {
  const BirthDistribution dist = birth_distribution(stack, k);
  IndicatorReport r;
  r.feature_entropy = feature_entropy(dist, options);
  r.selective_rate = dist.selective_rate();
  r.l1_norm = l1_norm(stack);
  r.apoz = apoz(stack);
  if (context.class_means) r.class_selectivity = class_selectivity(*context.class_means);
  if (context.filters) {
    const auto scores = fpgm_scores(*context.filters);
    if (stack.channel_id() >= scores.size()) throw ValidationError("channel has no FPGM filter");
    r.fpgm = scores[stack.channel_id()];
  }
  if (context.nisp_weights && context.nisp_next_scores) {
    const auto scores = nisp_backprop(*context.nisp_weights, *context.nisp_next_scores);
    if (stack.channel_id() >= scores.size()) throw ValidationError("channel has no NISP weight row");
    r.nisp = scores[stack.channel_id()];
  }
  return r;
}

}  // namespace featent
