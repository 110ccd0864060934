#pragma once

// Command-line driver. `run` parses arguments, executes one subcommand, and
// maps errors to exit codes: 0 success, 1 validation, 2 I/O, 3 internal.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "featent/activation.hpp"
#include "featent/analysis.hpp"
#include "featent/brute_force.hpp"
#include "featent/error.hpp"
#include "featent/homology.hpp"
#include "featent/indicators.hpp"
#include "featent/io.hpp"
#include "featent/parallel.hpp"
#include "featent/rng.hpp"
#include "featent/table.hpp"
#include "featent/version.hpp"

namespace featent::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

struct RunConfig {
  std::string manifest;
  std::vector<std::string> classes;
  std::vector<std::string> layers;
  int k = 1;
  double p = 0.1;
  std::string log_base = "e";
  std::size_t jobs = 0;  ///< 0 = available cores
  std::string out = ".";
  std::uint64_t seed = 0;

  double ratio = 0.5;
  std::vector<std::size_t> sizes{50, 100};
  std::size_t trials = 100;
  double factor = 0.5;
  std::string indicator = "feature_entropy";
  std::string direction = "ascending";
  std::optional<std::size_t> steps;
  std::size_t instances = 1000;

  std::string kind = "planted_cycle";
  std::size_t side = 14;
  std::size_t samples = 100;
  std::size_t channels = 4;
  std::size_t class_count = 2;
  double noise = 0.0;
  std::string layer_id = "synthetic";

  EntropyOptions entropy() const {
    return {p, log_base == "2" ? LogBase::two : LogBase::natural};
  }

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("--p must lie in (0, 1)");
    if (k != 0 && k != 1) throw ValidationError("--k must be 0 or 1");
    if (log_base != "e" && log_base != "2") throw ValidationError("--log-base must be 'e' or '2'");
  }

  std::size_t effective_jobs() const { return jobs == 0 ? default_jobs() : jobs; }
};

namespace detail {

struct UnitResult {
  std::vector<BirthTime> births;
  IndicatorReport report;
  double mean_activation = 0.0;
  std::optional<IndicatorReport> rescaled;
  bool distribution_identical = true;
};

/// Every selected class that has a tensor for one layer, with one result per
/// (class, channel) at index class_index * channels + channel.
struct LayerData {
  LayerInfo layer;
  std::vector<std::string> classes;
  std::vector<UnitResult> results;

  const UnitResult& at(std::size_t class_index, std::size_t channel) const {
    return results[class_index * layer.channels + channel];
  }
};

inline std::vector<std::string> selected_classes(const DatasetManifest& m, const RunConfig& cfg) {
  if (cfg.classes.empty()) return m.classes;
  for (const auto& c : cfg.classes) {
    if (std::find(m.classes.begin(), m.classes.end(), c) == m.classes.end()) {
      throw ValidationError("unknown class '" + c + "'");
    }
  }
  std::vector<std::string> out;
  for (const auto& c : m.classes) {
    if (std::find(cfg.classes.begin(), cfg.classes.end(), c) != cfg.classes.end()) out.push_back(c);
  }
  return out;
}

inline std::vector<const LayerInfo*> selected_layers(const DatasetManifest& m, const RunConfig& cfg) {
  std::vector<const LayerInfo*> out;
  for (const auto& id : cfg.layers) {
    if (!m.find_layer(id)) throw ValidationError("unknown layer '" + id + "'");
  }
  for (const auto& l : m.layers) {
    if (cfg.layers.empty() || std::find(cfg.layers.begin(), cfg.layers.end(), l.id) != cfg.layers.end()) {
      out.push_back(&l);
    }
  }
  return out;
}

inline LayerData compute_layer(const DatasetManifest& manifest, const LayerInfo& layer,
                               const std::vector<std::string>& classes, const RunConfig& cfg,
                               std::optional<double> rescale_factor = std::nullopt) {
  LayerData data;
  data.layer = layer;
  for (const auto& c : classes) {
    if (manifest.find_tensor(c, layer.id)) data.classes.push_back(c);
  }
  data.results.resize(data.classes.size() * layer.channels);
  const EntropyOptions options = cfg.entropy();

  parallel_for(data.results.size(), cfg.effective_jobs(), [&](std::size_t i) {
    const std::size_t class_index = i / layer.channels;
    const std::size_t channel = i % layer.channels;
    const ClassUnitStack stack = load_class_stack(manifest, data.classes[class_index], layer.id, channel);
    UnitResult& r = data.results[i];
    r.births = stack_birth_times(stack, cfg.k);
    const BirthDistribution dist = distribution_from(std::span<const BirthTime>(r.births));
    r.report.feature_entropy = feature_entropy(dist, options);
    r.report.selective_rate = dist.selective_rate();
    r.report.l1_norm = l1_norm(stack);
    r.report.apoz = apoz(stack);
    r.mean_activation = mean_activation(stack);
    if (rescale_factor) {
      const ClassUnitStack scaled = rescale_stack(stack, *rescale_factor);
      const BirthDistribution scaled_dist = birth_distribution(scaled, cfg.k);
      r.distribution_identical = scaled_dist == dist;
      IndicatorReport s;
      s.feature_entropy = feature_entropy(scaled_dist, options);
      s.selective_rate = scaled_dist.selective_rate();
      s.l1_norm = l1_norm(scaled);
      s.apoz = apoz(scaled);
      r.rescaled = s;
    }
  });
  return data;
}

inline std::string provenance(const std::string& command, const RunConfig& cfg, const std::string& layer = {}) {
  std::string s = command;
  if (!layer.empty()) s += " layer=" + layer;
  s += " k=" + std::to_string(cfg.k) + " p=" + format_number(cfg.p) + " log=" + cfg.log_base;
  return s;
}

inline std::filesystem::path output_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << doc.dump(2) << '\n';
  if (!f) throw IoError("write failed for " + path.string());
}

inline double rounded(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

/// Per-channel score averaged over the layer's classes.
inline std::vector<double> channel_scores(const LayerData& data, const std::string& indicator) {
  std::vector<double> scores;
  const auto classes = static_cast<double>(data.classes.size());
  for (std::size_t c = 0; c < data.layer.channels; ++c) {
    double h = 0.0, eps = 0.0, l1 = 0.0, zeros = 0.0;
    for (std::size_t k = 0; k < data.classes.size(); ++k) {
      const auto& r = data.at(k, c).report;
      h += r.feature_entropy;
      eps += r.selective_rate;
      l1 += r.l1_norm;
      zeros += r.apoz;
    }
    h /= classes;
    eps /= classes;
    if (indicator == "feature_entropy") scores.push_back(h);
    else if (indicator == "selective_rate") scores.push_back(eps);
    else if (indicator == "fused") scores.push_back(eps > 0.0 ? h / eps : std::numeric_limits<double>::infinity());
    else if (indicator == "l1_norm") scores.push_back(l1 / classes);
    else if (indicator == "apoz") scores.push_back(zeros / classes);
    else throw ValidationError("unknown indicator '" + indicator + "'");
  }
  return scores;
}

inline std::vector<LayerData> load_layers(const RunConfig& cfg, std::optional<double> rescale = std::nullopt) {
  if (cfg.manifest.empty()) throw ValidationError("--manifest is required");
  const DatasetManifest manifest = load_manifest(cfg.manifest);
  const auto classes = selected_classes(manifest, cfg);
  std::vector<LayerData> out;
  for (const LayerInfo* layer : selected_layers(manifest, cfg)) {
    LayerData data = compute_layer(manifest, *layer, classes, cfg, rescale);
    if (!data.classes.empty()) out.push_back(std::move(data));
  }
  return out;
}

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  for (const auto& data : load_layers(cfg)) {
    CsvTable table(provenance("analyze", cfg, data.layer.id),
                   {"class", "channel", "feature_entropy", "selective_rate", "l1_norm", "apoz", "class_selectivity"});
    std::vector<std::string> selectivity(data.layer.channels);
    if (data.classes.size() >= 2) {
      for (std::size_t c = 0; c < data.layer.channels; ++c) {
        std::map<std::string, double> means;
        for (std::size_t k = 0; k < data.classes.size(); ++k) means[data.classes[k]] = data.at(k, c).mean_activation;
        selectivity[c] = format_number(class_selectivity(means));
      }
    }
    for (std::size_t k = 0; k < data.classes.size(); ++k) {
      for (std::size_t c = 0; c < data.layer.channels; ++c) {
        const auto& r = data.at(k, c).report;
        table.add_row({data.classes[k], std::to_string(c), format_number(r.feature_entropy),
                       format_number(r.selective_rate), format_number(r.l1_norm), format_number(r.apoz),
                       selectivity[c]});
      }
    }
    const auto path = dir / ("analyze_" + data.layer.id + ".csv");
    table.write(path);
    out << "wrote " << path.string() << " (" << table.size() << " units)\n";
  }
  return kOk;
}

inline std::vector<UnitRecord> records_of(const LayerData& data) {
  std::vector<UnitRecord> records;
  for (std::size_t k = 0; k < data.classes.size(); ++k) {
    for (std::size_t c = 0; c < data.layer.channels; ++c) {
      records.push_back({data.classes[k], data.layer.id, c, data.at(k, c).report});
    }
  }
  return records;
}

inline int cmd_layer_summary(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  for (const auto& data : load_layers(cfg)) {
    const auto records = records_of(data);
    const LayerSummary s = layer_summary(records);
    CsvTable table(provenance("layer-summary", cfg, s.layer_id),
                   {"layer", "mean_feature_entropy", "mean_selective_rate", "unit_count", "class_count"});
    table.add_row({s.layer_id, format_number(s.mean_feature_entropy), format_number(s.mean_selective_rate),
                   std::to_string(s.unit_count), std::to_string(s.class_count)});
    const auto path = dir / ("layer-summary_" + s.layer_id + ".csv");
    table.write(path);
    out << s.layer_id << ": H=" << format_number(s.mean_feature_entropy)
        << " eps=" << format_number(s.mean_selective_rate) << "\n";
  }
  return kOk;
}

inline int cmd_scatter(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  for (const auto& data : load_layers(cfg)) {
    const auto records = records_of(data);
    CsvTable table(provenance("scatter", cfg, data.layer.id), {"class", "feature_entropy", "selective_rate"});
    for (const auto& p : class_scatter(records)) {
      table.add_row({p.class_id, format_number(p.feature_entropy), format_number(p.selective_rate)});
    }
    const auto path = dir / ("scatter_" + data.layer.id + ".csv");
    table.write(path);
    out << "wrote " << path.string() << "\n";
  }
  return kOk;
}

inline int cmd_rank(const RunConfig& cfg, std::ostream& out, bool plan) {
  const auto dir = output_dir(cfg);
  const Direction direction = parse_direction(cfg.direction);
  for (const auto& data : load_layers(cfg)) {
    const auto scores = channel_scores(data, cfg.indicator);
    const UnitRanking ranking = rank_units(scores, direction, data.layer.id, cfg.indicator);
    if (!plan) {
      CsvTable table(provenance("rank", cfg, data.layer.id) + " indicator=" + cfg.indicator +
                         " direction=" + cfg.direction,
                     {"position", "channel", "score"});
      for (std::size_t i = 0; i < ranking.order.size(); ++i) {
        table.add_row({std::to_string(i + 1), std::to_string(ranking.order[i]), format_number(scores[ranking.order[i]])});
      }
      const auto path = dir / ("rank_" + data.layer.id + ".csv");
      table.write(path);
      out << "wrote " << path.string() << "\n";
      continue;
    }
    const std::size_t steps = cfg.steps.value_or(ranking.order.size());
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["command"] = "ablation-plan";
    doc["layer"] = data.layer.id;
    doc["indicator"] = cfg.indicator;
    doc["direction"] = cfg.direction;
    doc["classes"] = data.classes;
    doc["order"] = ranking.order;
    doc["steps"] = ablation_plan(ranking, steps);
    const auto path = dir / ("ablation-plan_" + data.layer.id + ".json");
    write_json(path, doc);
    out << "wrote " << path.string() << " (" << steps << " steps)\n";
  }
  return kOk;
}

inline int cmd_prune_plan(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  for (const auto& data : load_layers(cfg)) {
    std::vector<std::vector<double>> entropy(data.layer.channels);
    std::vector<double> eps(data.layer.channels, 0.0);
    for (std::size_t c = 0; c < data.layer.channels; ++c) {
      for (std::size_t k = 0; k < data.classes.size(); ++k) {
        entropy[c].push_back(data.at(k, c).report.feature_entropy);
        eps[c] += data.at(k, c).report.selective_rate;
      }
      eps[c] /= static_cast<double>(data.classes.size());
    }
    const PruneSelection sel = prune_selection(entropy, eps, cfg.ratio);
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["command"] = "prune-plan";
    doc["layer"] = data.layer.id;
    doc["ratio"] = cfg.ratio;
    doc["class_count"] = data.classes.size();
    doc["keep"] = sel.keep;
    doc["drop"] = sel.drop;
    auto fused = nlohmann::json::array();
    for (double f : sel.fused) fused.push_back(std::isfinite(f) ? nlohmann::json(rounded(f)) : nlohmann::json("inf"));
    doc["fused_score"] = fused;
    const auto path = dir / ("prune-plan_" + data.layer.id + ".json");
    write_json(path, doc);
    out << "wrote " << path.string() << " (drop " << sel.drop.size() << " of " << sel.fused.size() << ")\n";
  }
  return kOk;
}

inline int cmd_sample_size(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  for (const auto& data : load_layers(cfg)) {
    CsvTable table(provenance("sample-size", cfg, data.layer.id) + " trials=" + std::to_string(cfg.trials) +
                       " seed=" + std::to_string(cfg.seed),
                   {"class", "channel", "size", "mean_feature_entropy", "sd_feature_entropy"});
    for (std::size_t k = 0; k < data.classes.size(); ++k) {
      std::vector<std::vector<BirthTime>> layer_births;
      for (std::size_t c = 0; c < data.layer.channels; ++c) {
        const auto& births = data.at(k, c).births;
        layer_births.push_back(births);
        for (const auto& s : layer_sample_size_study({births}, cfg.sizes, cfg.trials, cfg.seed, cfg.entropy())) {
          table.add_row({data.classes[k], std::to_string(c), std::to_string(s.size), format_number(s.mean),
                         format_number(s.sd)});
        }
      }
      for (const auto& s : layer_sample_size_study(layer_births, cfg.sizes, cfg.trials, cfg.seed, cfg.entropy())) {
        table.add_row({data.classes[k], "layer_mean", std::to_string(s.size), format_number(s.mean),
                       format_number(s.sd)});
      }
    }
    const auto path = dir / ("sample-size_" + data.layer.id + ".csv");
    table.write(path);
    out << "wrote " << path.string() << "\n";
  }
  return kOk;
}

inline int cmd_rescale_check(const RunConfig& cfg, std::ostream& out) {
  const auto dir = output_dir(cfg);
  std::size_t units = 0, invariant = 0;
  for (const auto& data : load_layers(cfg, cfg.factor)) {
    CsvTable table(provenance("rescale-check", cfg, data.layer.id) + " factor=" + format_number(cfg.factor),
                   {"class", "channel", "birth_distribution_identical", "feature_entropy", "feature_entropy_rescaled",
                    "feature_entropy_delta", "l1_norm", "l1_norm_rescaled", "l1_delta_pct", "apoz", "apoz_rescaled",
                    "apoz_delta"});
    for (std::size_t k = 0; k < data.classes.size(); ++k) {
      for (std::size_t c = 0; c < data.layer.channels; ++c) {
        const auto& r = data.at(k, c);
        const auto& a = r.report;
        const auto& b = *r.rescaled;
        const double l1_pct = a.l1_norm == 0.0 ? 0.0 : 100.0 * (b.l1_norm - a.l1_norm) / a.l1_norm;
        table.add_row({data.classes[k], std::to_string(c), r.distribution_identical ? "true" : "false",
                       format_number(a.feature_entropy), format_number(b.feature_entropy),
                       format_number(b.feature_entropy - a.feature_entropy), format_number(a.l1_norm),
                       format_number(b.l1_norm), format_number(l1_pct), format_number(a.apoz), format_number(b.apoz),
                       format_number(b.apoz - a.apoz)});
        ++units;
        invariant += r.distribution_identical && a.feature_entropy == b.feature_entropy && a.apoz == b.apoz;
      }
    }
    const auto path = dir / ("rescale-check_" + data.layer.id + ".csv");
    table.write(path);
  }
  out << invariant << "/" << units << " units invariant under factor " << format_number(cfg.factor) << "\n";
  if (invariant != units) throw InvariantError("feature entropy changed under rescaling");
  return kOk;
}

inline int cmd_synthetic(const RunConfig& cfg, std::ostream& out) {
  const SyntheticKind kind = parse_synthetic_kind(cfg.kind);
  if (cfg.class_count < 1 || cfg.channels < 1) throw ValidationError("--class-count and --channels must be positive");
  DatasetWriter writer(cfg.out);
  writer.add_layer({cfg.layer_id, cfg.side, cfg.channels});
  for (std::size_t k = 0; k < cfg.class_count; ++k) {
    const std::string class_id = "c" + std::to_string(k);
    std::vector<ClassUnitStack> channels;
    for (std::size_t c = 0; c < cfg.channels; ++c) {
      SyntheticSpec spec;
      spec.kind = kind;
      spec.side = cfg.side;
      spec.sample_count = cfg.samples;
      spec.noise = cfg.noise;
      spec.seed = derive_seed(cfg.seed, k * cfg.channels + c);
      spec.class_id = class_id;
      spec.layer_id = cfg.layer_id;
      spec.channel_id = c;
      channels.push_back(generate_synthetic(spec));
    }
    writer.add_tensor(class_id, cfg.layer_id, class_id + "_" + cfg.layer_id + ".f32", channels);
  }
  const auto path = writer.finish();
  out << "wrote " << path.string() << "\n";
  return kOk;
}

inline int cmd_oracle_check(const RunConfig& cfg, std::ostream& out) {
  std::optional<CsvTable> table;
  if (cfg.out != ".") {
    table.emplace("oracle-check instances=" + std::to_string(cfg.instances) + " seed=" + std::to_string(cfg.seed),
                  std::vector<std::string>{"instance", "vertices", "edges", "beta0", "beta1", "oracle_beta0",
                                           "oracle_beta1", "match"});
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    SplitMix64 rng(derive_seed(cfg.seed, i));
    const std::size_t n = 1 + rng.below(8);
    const double density = rng.unit53();
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (rng.unit53() < density) edges.push_back(Edge::make(a, b));
      }
    }
    const FlagComplex fc = flag_complex(edges, n, 1);
    const std::size_t b0 = betti_numbers(fc, 0), b1 = betti_numbers(fc, 1);
    IncrementalFlagHomology inc(n, 1);
    for (const Edge& e : edges) inc.add_edge(e);
    const std::size_t o0 = brute_force_betti(edges, n, 0), o1 = brute_force_betti(edges, n, 1);
    const bool ok = b0 == o0 && b1 == o1 && inc.betti(0) == o0 && inc.betti(1) == o1;
    matches += ok;
    if (table) {
      table->add_row({std::to_string(i), std::to_string(n), std::to_string(edges.size()), std::to_string(b0),
                      std::to_string(b1), std::to_string(o0), std::to_string(o1), ok ? "true" : "false"});
    }
  }
  if (table) table->write(output_dir(cfg) / "oracle-check.csv");
  out << matches << "/" << cfg.instances << " match\n";
  if (matches != cfg.instances) throw InvariantError("homology engine disagrees with the brute-force oracle");
  return kOk;
}

inline void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--manifest", cfg.manifest, "Path to manifest.json");
  sub->add_option("--classes", cfg.classes, "Comma-separated class filter")->delimiter(',');
  sub->add_option("--layers", cfg.layers, "Comma-separated layer filter")->delimiter(',');
  sub->add_option("--k", cfg.k, "Homology degree (0 or 1)");
  sub->add_option("--p", cfg.p, "Selective-rate threshold in (0, 1)");
  sub->add_option("--log-base", cfg.log_base, "Entropy logarithm base: e or 2");
  sub->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)");
  sub->add_option("--out", cfg.out, "Output directory");
  sub->add_option("--seed", cfg.seed, "Random seed");
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Topological feature entropy of CNN units", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Per-unit indicator reports");
  auto* summary = app.add_subcommand("layer-summary", "Mean feature entropy and selective rate per layer");
  auto* scatter = app.add_subcommand("scatter", "Per-class (feature entropy, selective rate) points");
  auto* rank = app.add_subcommand("rank", "Rank channels by an indicator");
  auto* ablation = app.add_subcommand("ablation-plan", "Cumulative ablation sets from a ranking");
  auto* prune = app.add_subcommand("prune-plan", "Channels to keep and drop at a pruning ratio");
  auto* sample = app.add_subcommand("sample-size", "Feature entropy spread under subsampling");
  auto* synthetic = app.add_subcommand("synthetic", "Write a synthetic dataset");
  auto* oracle = app.add_subcommand("oracle-check", "Compare the homology engine with a brute-force oracle");
  auto* rescale = app.add_subcommand("rescale-check", "Audit indicator behaviour under rescaling");

  for (auto* sub : {analyze, summary, scatter, rank, ablation, prune, sample, synthetic, oracle, rescale}) {
    detail::add_common(sub, cfg);
  }
  for (auto* sub : {rank, ablation}) {
    sub->add_option("--indicator", cfg.indicator,
                    "feature_entropy, fused, selective_rate, l1_norm, or apoz");
    sub->add_option("--direction", cfg.direction, "ascending or descending");
  }
  ablation->add_option("--steps", cfg.steps, "Number of cumulative steps (default: all channels)");
  prune->add_option("--ratio", cfg.ratio, "Fraction of channels to drop, in (0, 1)");
  sample->add_option("--sizes", cfg.sizes, "Comma-separated subsample sizes")->delimiter(',');
  sample->add_option("--trials", cfg.trials, "Subsamples per size");
  rescale->add_option("--factor", cfg.factor, "Positive rescale factor");
  oracle->add_option("--instances", cfg.instances, "Random graphs to check");
  synthetic->add_option("--kind", cfg.kind, "planted_cycle, uniform_random, sparse_random, or all_zero");
  synthetic->add_option("--side", cfg.side, "Unit side m");
  synthetic->add_option("--samples", cfg.samples, "Samples per class");
  synthetic->add_option("--channels", cfg.channels, "Channels in the layer");
  synthetic->add_option("--class-count", cfg.class_count, "Number of classes");
  synthetic->add_option("--noise", cfg.noise, "Background level for planted_cycle, in [0, 1]");
  synthetic->add_option("--layer-id", cfg.layer_id, "Layer id written to the manifest");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    cfg.validate();
    if (analyze->parsed()) return detail::cmd_analyze(cfg, out);
    if (summary->parsed()) return detail::cmd_layer_summary(cfg, out);
    if (scatter->parsed()) return detail::cmd_scatter(cfg, out);
    if (rank->parsed()) return detail::cmd_rank(cfg, out, false);
    if (ablation->parsed()) return detail::cmd_rank(cfg, out, true);
    if (prune->parsed()) return detail::cmd_prune_plan(cfg, out);
    if (sample->parsed()) return detail::cmd_sample_size(cfg, out);
    if (synthetic->parsed()) return detail::cmd_synthetic(cfg, out);
    if (oracle->parsed()) return detail::cmd_oracle_check(cfg, out);
    if (rescale->parsed()) return detail::cmd_rescale_check(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace featent::cli
