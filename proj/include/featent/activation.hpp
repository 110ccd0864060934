#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "featent/error.hpp"
#include "featent/rng.hpp"

namespace featent {

/// One post-activation feature map of side m, stored row-major.
///
/// Values are held as double. Anything loaded from the float32 interchange
/// format converts exactly, and multiplying a float32 value by a positive
/// factor in double never merges two distinct values, so rescaling preserves
/// the value ordering the filtration depends on.
class ActivationUnit {
 public:
  ActivationUnit(std::size_t side, std::vector<double> values)
      : side_(side), values_(std::move(values)) {
    if (side_ < 2) throw ValidationError("unit side must be at least 2, got " + std::to_string(side_));
    if (values_.size() != side_ * side_) {
      throw ValidationError("unit of side " + std::to_string(side_) + " needs " +
                            std::to_string(side_ * side_) + " values, got " +
                            std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
        throw ValidationError("unit entry (" + std::to_string(i / side_) + ", " +
                              std::to_string(i % side_) + ") is negative or not finite");
      }
    }
  }

  static ActivationUnit zeros(std::size_t side) {
    return ActivationUnit(side, std::vector<double>(side * side, 0.0));
  }

  std::size_t side() const noexcept { return side_; }
  double at(std::size_t row, std::size_t col) const noexcept { return values_[row * side_ + col]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ActivationUnit&, const ActivationUnit&) = default;

 private:
  std::size_t side_;
  std::vector<double> values_;
};

/// All samples of one (class, layer, channel) unit.
class ClassUnitStack {
 public:
  ClassUnitStack(std::string class_id, std::string layer_id, std::size_t channel_id,
                 std::vector<ActivationUnit> units)
      : class_id_(std::move(class_id)),
        layer_id_(std::move(layer_id)),
        channel_id_(channel_id),
        units_(std::move(units)) {
    if (units_.empty()) throw ValidationError("a unit stack needs at least one sample");
    for (const auto& u : units_) {
      if (u.side() != units_.front().side()) throw ValidationError("units in a stack must share one side");
    }
  }

  const std::string& class_id() const noexcept { return class_id_; }
  const std::string& layer_id() const noexcept { return layer_id_; }
  std::size_t channel_id() const noexcept { return channel_id_; }
  std::size_t side() const noexcept { return units_.front().side(); }
  std::size_t sample_count() const noexcept { return units_.size(); }
  std::span<const ActivationUnit> units() const noexcept { return units_; }
  const ActivationUnit& operator[](std::size_t i) const { return units_.at(i); }

  friend bool operator==(const ClassUnitStack&, const ClassUnitStack&) = default;

 private:
  std::string class_id_;
  std::string layer_id_;
  std::size_t channel_id_;
  std::vector<ActivationUnit> units_;
};

/// Multiplies every entry by `factor` (> 0).
inline ClassUnitStack rescale_stack(const ClassUnitStack& stack, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ValidationError("rescale factor must be positive and finite");
  }
  std::vector<ActivationUnit> units;
  units.reserve(stack.sample_count());
  for (const auto& u : stack.units()) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= factor;
    units.emplace_back(u.side(), std::move(v));
  }
  return ClassUnitStack(stack.class_id(), stack.layer_id(), stack.channel_id(), std::move(units));
}

enum class SyntheticKind { planted_cycle, uniform_random, sparse_random, all_zero };

inline SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "planted_cycle") return SyntheticKind::planted_cycle;
  if (name == "uniform_random") return SyntheticKind::uniform_random;
  if (name == "sparse_random") return SyntheticKind::sparse_random;
  if (name == "all_zero") return SyntheticKind::all_zero;
  throw ValidationError("unknown synthetic kind '" + std::string(name) + "'");
}

inline std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::planted_cycle: return "planted_cycle";
    case SyntheticKind::uniform_random: return "uniform_random";
    case SyntheticKind::sparse_random: return "sparse_random";
    case SyntheticKind::all_zero: return "all_zero";
  }
  return "unknown";
}

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::uniform_random;
  std::size_t side = 14;
  std::size_t sample_count = 100;
  /// planted_cycle only: background entries are drawn from [0, noise).
  double noise = 0.0;
  std::uint64_t seed = 0;
  /// sparse_random only: probability that an entry is zero.
  double sparsity = 0.8;
  std::string class_id = "synthetic";
  std::string layer_id = "synthetic";
  std::size_t channel_id = 0;
};

/// Row-major positions and values of the planted 4-cycle for side m:
/// (0,1), (m-1,m-2), (1,m-1), (m-2,0). Values descend, all above any
/// background entry.
inline constexpr double kPlantedValues[4] = {2.0, 1.75, 1.5, 1.25};

inline std::vector<std::pair<std::size_t, std::size_t>> planted_positions(std::size_t side) {
  return {{0, 1}, {side - 1, side - 2}, {1, side - 1}, {side - 2, 0}};
}

/// Deterministic synthetic stack. Every value lies on the 2^-24 grid, so it
/// survives a float32 round trip unchanged. One SplitMix64 stream is seeded
/// with `seed` and consumed cell by cell in (sample, row, col) order: one
/// draw per cell, two for sparse_random (zero test, then value).
inline ClassUnitStack generate_synthetic(const SyntheticSpec& spec) {
  if (spec.side < 2) throw ValidationError("synthetic side must be at least 2");
  if (spec.sample_count < 1) throw ValidationError("synthetic sample count must be at least 1");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw ValidationError("noise must lie in [0, 1]");
  if (!(spec.sparsity >= 0.0 && spec.sparsity <= 1.0)) throw ValidationError("sparsity must lie in [0, 1]");

  const std::size_t m = spec.side;
  SplitMix64 rng(spec.seed);
  std::vector<ActivationUnit> units;
  units.reserve(spec.sample_count);
  const auto planted = planted_positions(m);

  for (std::size_t s = 0; s < spec.sample_count; ++s) {
    std::vector<double> v(m * m, 0.0);
    for (std::size_t cell = 0; cell < m * m; ++cell) {
      switch (spec.kind) {
        case SyntheticKind::planted_cycle:
          v[cell] = std::floor(spec.noise * std::ldexp(rng.unit24(), 24)) * 0x1.0p-24;
          break;
        case SyntheticKind::uniform_random:
          v[cell] = rng.unit24();
          break;
        case SyntheticKind::sparse_random: {
          const bool zero = rng.unit53() < spec.sparsity;
          const double value = rng.unit24();
          v[cell] = zero ? 0.0 : value;
          break;
        }
        case SyntheticKind::all_zero:
          break;
      }
    }
    if (spec.kind == SyntheticKind::planted_cycle) {
      for (std::size_t t = 0; t < planted.size(); ++t) {
        v[planted[t].first * m + planted[t].second] = kPlantedValues[t];
      }
    }
    units.emplace_back(m, std::move(v));
  }
  return ClassUnitStack(spec.class_id, spec.layer_id, spec.channel_id, std::move(units));
}

}  // namespace featent
