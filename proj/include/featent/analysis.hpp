#pragma once

// Aggregations over per-unit indicator reports: layer means, per-class
// scatter points, unit rankings and ablation plans, pruning selection,
// sample-size studies, and comparison against random units.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "featent/activation.hpp"
#include "featent/error.hpp"
#include "featent/indicators.hpp"
#include "featent/rng.hpp"
#include "featent/stats.hpp"

namespace featent {

/// One indicator report tagged with where it came from.
struct UnitRecord {
  std::string class_id;
  std::string layer_id;
  std::size_t channel = 0;
  IndicatorReport report;
};

namespace detail {

inline std::vector<const UnitRecord*> sorted_by_class_channel(std::span<const UnitRecord> records) {
  std::vector<const UnitRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const UnitRecord* a, const UnitRecord* b) {
    return a->class_id != b->class_id ? a->class_id < b->class_id : a->channel < b->channel;
  });
  return order;
}

}  // namespace detail

struct LayerSummary {
  std::string layer_id;
  double mean_feature_entropy = 0.0;
  double mean_selective_rate = 0.0;
  std::size_t unit_count = 0;   ///< distinct channels
  std::size_t class_count = 0;  ///< distinct classes
};

/// Arithmetic means over every (class, channel) record, summed in
/// (class, channel) order so the result does not depend on input order.
inline LayerSummary layer_summary(std::span<const UnitRecord> records) {
  if (records.empty()) throw ValidationError("layer summary needs at least one report");
  LayerSummary s;
  s.layer_id = records.front().layer_id;
  std::set<std::string> classes;
  std::set<std::size_t> channels;
  double h = 0.0, eps = 0.0;
  for (const UnitRecord* r : detail::sorted_by_class_channel(records)) {
    if (r->layer_id != s.layer_id) throw ValidationError("layer summary mixes layers");
    h += r->report.feature_entropy;
    eps += r->report.selective_rate;
    classes.insert(r->class_id);
    channels.insert(r->channel);
  }
  const auto n = static_cast<double>(records.size());
  s.mean_feature_entropy = h / n;
  s.mean_selective_rate = eps / n;
  s.unit_count = channels.size();
  s.class_count = classes.size();
  return s;
}

struct ClassScatterPoint {
  std::string class_id;
  double feature_entropy = 0.0;
  double selective_rate = 0.0;
};

/// One point per class: the mean (H, eps) over that class's channels,
/// ordered by class id.
inline std::vector<ClassScatterPoint> class_scatter(std::span<const UnitRecord> records) {
  std::vector<ClassScatterPoint> points;
  std::size_t in_class = 0;
  for (const UnitRecord* r : detail::sorted_by_class_channel(records)) {
    if (points.empty() || points.back().class_id != r->class_id) {
      if (!points.empty()) {
        points.back().feature_entropy /= static_cast<double>(in_class);
        points.back().selective_rate /= static_cast<double>(in_class);
      }
      points.push_back({r->class_id, 0.0, 0.0});
      in_class = 0;
    }
    points.back().feature_entropy += r->report.feature_entropy;
    points.back().selective_rate += r->report.selective_rate;
    ++in_class;
  }
  if (!points.empty()) {
    points.back().feature_entropy /= static_cast<double>(in_class);
    points.back().selective_rate /= static_cast<double>(in_class);
  }
  return points;
}

enum class Direction { ascending, descending };

inline Direction parse_direction(std::string_view name) {
  if (name == "ascending") return Direction::ascending;
  if (name == "descending") return Direction::descending;
  throw ValidationError("direction must be 'ascending' or 'descending'");
}

inline std::string_view to_string(Direction d) noexcept {
  return d == Direction::ascending ? "ascending" : "descending";
}

struct UnitRanking {
  std::string layer_id;
  std::vector<std::size_t> order;  ///< channel indices
  Direction direction = Direction::ascending;
  std::string indicator;
};

/// Stable sort of channel indices by score; ties keep ascending channel order.
inline UnitRanking rank_units(std::span<const double> scores, Direction direction, std::string layer_id = {},
                              std::string indicator = {}) {
  UnitRanking r{std::move(layer_id), std::vector<std::size_t>(scores.size()), direction, std::move(indicator)};
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::ascending ? scores[a] < scores[b] : scores[a] > scores[b];
  });
  return r;
}

/// Step t (1-based) removes the first t channels of the ranking.
inline std::vector<std::vector<std::size_t>> ablation_plan(const UnitRanking& ranking, std::size_t steps) {
  if (steps > ranking.order.size()) throw ValidationError("ablation plan has more steps than channels");
  std::vector<std::vector<std::size_t>> plan;
  plan.reserve(steps);
  for (std::size_t t = 1; t <= steps; ++t) plan.emplace_back(ranking.order.begin(), ranking.order.begin() + t);
  return plan;
}

struct PruneSelection {
  std::vector<std::size_t> keep;  ///< ascending channel index
  std::vector<std::size_t> drop;  ///< ascending channel index
  std::vector<double> fused;      ///< per channel; +inf where eps = 0
};

/// ceil(ratio * n), ignoring floating-point dust just above an integer.
inline std::size_t prune_count(double ratio, std::size_t channels) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("prune ratio must lie in (0, 1)");
  const double raw = ratio * static_cast<double>(channels);
  const double nearest = std::round(raw);
  const double count = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::ceil(raw);
  return static_cast<std::size_t>(count);
}

/// Drops the channels with the highest fused score; ties drop the lower
/// channel index first.
inline PruneSelection prune_by_fused(std::vector<double> fused, double ratio) {
  if (fused.empty()) throw ValidationError("nothing to prune");
  const std::size_t n_drop = prune_count(ratio, fused.size());
  const UnitRanking order = rank_units(fused, Direction::descending);
  PruneSelection sel;
  sel.drop.assign(order.order.begin(), order.order.begin() + static_cast<std::ptrdiff_t>(n_drop));
  sel.keep.assign(order.order.begin() + static_cast<std::ptrdiff_t>(n_drop), order.order.end());
  std::sort(sel.drop.begin(), sel.drop.end());
  std::sort(sel.keep.begin(), sel.keep.end());
  sel.fused = std::move(fused);
  return sel;
}

/// `per_class_entropy[c]` holds channel c's feature entropy for each of the
/// K classes; it is averaged over classes and divided by the channel's
/// selective rate. A zero selective rate scores +inf and is dropped first.
inline PruneSelection prune_selection(const std::vector<std::vector<double>>& per_class_entropy,
                                      std::span<const double> selective_rates, double ratio) {
  if (per_class_entropy.empty() || per_class_entropy.front().empty()) throw ValidationError("empty entropy matrix");
  if (selective_rates.size() != per_class_entropy.size()) {
    throw ValidationError("one selective rate per channel is required");
  }
  const std::size_t classes = per_class_entropy.front().size();
  std::vector<double> fused;
  fused.reserve(per_class_entropy.size());
  for (std::size_t c = 0; c < per_class_entropy.size(); ++c) {
    if (per_class_entropy[c].size() != classes) throw ValidationError("ragged entropy matrix");
    double h = 0.0;
    for (double x : per_class_entropy[c]) h += x;
    h /= static_cast<double>(classes);
    const double eps = selective_rates[c];
    fused.push_back(eps > 0.0 ? h / eps : std::numeric_limits<double>::infinity());
  }
  return prune_by_fused(std::move(fused), ratio);
}

struct SampleSizeStat {
  std::size_t size = 0;
  double mean = 0.0;
  double sd = 0.0;
};

namespace detail {

/// First `size` entries of a seeded partial Fisher-Yates shuffle of [0, n).
inline std::vector<std::size_t> subsample(std::size_t n, std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  return idx;
}

inline void check_sizes(std::span<const std::size_t> sizes, std::size_t n, std::size_t trials) {
  if (trials < 1) throw ValidationError("sample-size study needs at least one trial");
  for (auto s : sizes) {
    if (s < 1 || s > n) throw ValidationError("sample size " + std::to_string(s) + " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace detail

/// Feature entropy of `trials` random subsets (without replacement) per size.
/// A subset's draw depends only on (seed, size, trial).
inline std::vector<SampleSizeStat> layer_sample_size_study(const std::vector<std::vector<BirthTime>>& births_per_unit,
                                                           std::span<const std::size_t> sizes, std::size_t trials,
                                                           std::uint64_t seed, const EntropyOptions& options = {}) {
  if (births_per_unit.empty()) throw ValidationError("sample-size study needs at least one unit");
  const std::size_t n = births_per_unit.front().size();
  for (const auto& b : births_per_unit) {
    if (b.size() != n) throw ValidationError("units disagree on sample count");
  }
  detail::check_sizes(sizes, n, trials);

  std::vector<SampleSizeStat> out;
  std::vector<BirthTime> picked;
  for (std::size_t size : sizes) {
    std::vector<double> values;
    values.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto idx = detail::subsample(n, size, derive_seed(derive_seed(seed, size), t));
      double layer_h = 0.0;
      for (const auto& births : births_per_unit) {
        picked.clear();
        for (auto i : idx) picked.push_back(births[i]);
        layer_h += feature_entropy(distribution_from(std::span<const BirthTime>(picked)), options);
      }
      values.push_back(layer_h / static_cast<double>(births_per_unit.size()));
    }
    const MeanSd ms = mean_sd(values);
    out.push_back({size, ms.mean, ms.sd});
  }
  return out;
}

inline std::vector<SampleSizeStat> sample_size_study(const ClassUnitStack& stack, std::span<const std::size_t> sizes,
                                                     std::size_t trials, std::uint64_t seed, int k = 1,
                                                     const EntropyOptions& options = {}) {
  require_supported_degree(k);
  detail::check_sizes(sizes, stack.sample_count(), trials);
  return layer_sample_size_study({stack_birth_times(stack, k)}, sizes, trials, seed, options);
}

struct RandomnessOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  int k = 1;
  EntropyOptions entropy;
  /// Each random stack is rescaled by a log-uniform factor from this range,
  /// mimicking the magnitude spread of randomly initialized layers.
  double scale_min = 1.0;
  double scale_max = 1.0;
};

struct RandomnessReport {
  IndicatorReport reference;
  MeanSd feature_entropy;
  MeanSd selective_rate;
  MeanSd l1_norm;
  MeanSd apoz;
  std::vector<IndicatorReport> trials;
};

/// Scores `trials` uniform_random stacks shaped like `reference` and reports
/// mean (sd) of each indicator next to the reference unit's own report.
inline RandomnessReport randomness_comparison(const ClassUnitStack& reference, const RandomnessOptions& options) {
  if (options.trials < 1) throw ValidationError("randomness comparison needs at least one trial");
  if (!(options.scale_min > 0.0 && options.scale_max >= options.scale_min)) {
    throw ValidationError("scale range must satisfy 0 < min <= max");
  }
  RandomnessReport report;
  report.reference = unit_report(reference, options.k, options.entropy);

  std::vector<double> h, eps, l1, zeros;
  for (std::size_t t = 0; t < options.trials; ++t) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::uniform_random;
    spec.side = reference.side();
    spec.sample_count = reference.sample_count();
    spec.seed = derive_seed(options.seed, t);
    ClassUnitStack stack = generate_synthetic(spec);
    if (options.scale_max > options.scale_min) {
      SplitMix64 scale_rng(derive_seed(options.seed ^ 0x5ca1eULL, t));
      const double lo = std::log(options.scale_min), hi = std::log(options.scale_max);
      stack = rescale_stack(stack, std::exp(lo + scale_rng.unit53() * (hi - lo)));
    } else if (options.scale_min != 1.0) {
      stack = rescale_stack(stack, options.scale_min);
    }
    report.trials.push_back(unit_report(stack, options.k, options.entropy));
    h.push_back(report.trials.back().feature_entropy);
    eps.push_back(report.trials.back().selective_rate);
    l1.push_back(report.trials.back().l1_norm);
    zeros.push_back(report.trials.back().apoz);
  }
  report.feature_entropy = mean_sd(h);
  report.selective_rate = mean_sd(eps);
  report.l1_norm = mean_sd(l1);
  report.apoz = mean_sd(zeros);
  return report;
}

}  // namespace featent
