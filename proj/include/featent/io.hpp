#pragma once

// Interchange format.
//
// manifest.json:
//   { "version": 1,
//     "classes": ["c0", ...],
//     "layers":  [{"id": "L", "side": 14, "channels": 512}, ...],
//     "tensors": [{"class": "c0", "layer": "L", "file": "c0_L.f32", "samples": 100}, ...] }
//
// Tensor files: raw little-endian float32, row-major, dimension order
// (sample, channel, row, col), no header. File paths are relative to the
// directory holding the manifest.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "featent/activation.hpp"
#include "featent/error.hpp"

namespace featent {

struct LayerInfo {
  std::string id;
  std::size_t side = 0;
  std::size_t channels = 0;
};

struct TensorRef {
  std::string class_id;
  std::string layer_id;
  std::string file;             ///< as written in the manifest
  std::filesystem::path path;   ///< resolved against the manifest directory
  std::size_t samples = 0;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<std::string> classes;
  std::vector<LayerInfo> layers;
  std::vector<TensorRef> tensors;

  const LayerInfo* find_layer(const std::string& id) const {
    auto it = std::find_if(layers.begin(), layers.end(), [&](const LayerInfo& l) { return l.id == id; });
    return it == layers.end() ? nullptr : &*it;
  }

  const TensorRef* find_tensor(const std::string& class_id, const std::string& layer_id) const {
    auto it = std::find_if(tensors.begin(), tensors.end(), [&](const TensorRef& t) {
      return t.class_id == class_id && t.layer_id == layer_id;
    });
    return it == tensors.end() ? nullptr : &*it;
  }
};

namespace detail {

inline std::uintmax_t expected_tensor_bytes(std::size_t samples, const LayerInfo& layer) {
  return static_cast<std::uintmax_t>(samples) * layer.channels * layer.side * layer.side * 4u;
}

inline float decode_f32le(const unsigned char* p) noexcept {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

inline void encode_f32le(float value, unsigned char* p) noexcept {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  p[0] = static_cast<unsigned char>(bits);
  p[1] = static_cast<unsigned char>(bits >> 8);
  p[2] = static_cast<unsigned char>(bits >> 16);
  p[3] = static_cast<unsigned char>(bits >> 24);
}

template <typename T>
T required_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError("manifest: " + where + " is missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("manifest: " + where + " has a malformed field '" + key + "'");
  }
}

}  // namespace detail

/// Reads and fully validates a manifest, including the byte length of every
/// referenced tensor file.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("manifest: top level must be an object");

  if (detail::required_field<int>(doc, "version", "document") != 1) {
    throw ValidationError("manifest: unsupported version");
  }

  DatasetManifest manifest;
  manifest.root = path.parent_path();
  manifest.classes = detail::required_field<std::vector<std::string>>(doc, "classes", "document");
  if (std::set<std::string>(manifest.classes.begin(), manifest.classes.end()).size() != manifest.classes.size()) {
    throw ValidationError("manifest: duplicate class id");
  }

  const auto layers = detail::required_field<nlohmann::json>(doc, "layers", "document");
  if (!layers.is_array()) throw ValidationError("manifest: 'layers' must be an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string where = "layers[" + std::to_string(i) + "]";
    LayerInfo layer;
    layer.id = detail::required_field<std::string>(layers[i], "id", where);
    const auto side = detail::required_field<long long>(layers[i], "side", where);
    const auto channels = detail::required_field<long long>(layers[i], "channels", where);
    if (side < 2) throw ValidationError("manifest: " + where + " side must be at least 2");
    if (channels < 1) throw ValidationError("manifest: " + where + " needs at least one channel");
    if (manifest.find_layer(layer.id)) throw ValidationError("manifest: duplicate layer id '" + layer.id + "'");
    layer.side = static_cast<std::size_t>(side);
    layer.channels = static_cast<std::size_t>(channels);
    manifest.layers.push_back(std::move(layer));
  }

  const auto tensors = detail::required_field<nlohmann::json>(doc, "tensors", "document");
  if (!tensors.is_array()) throw ValidationError("manifest: 'tensors' must be an array");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::string where = "tensors[" + std::to_string(i) + "]";
    TensorRef ref;
    ref.class_id = detail::required_field<std::string>(tensors[i], "class", where);
    ref.layer_id = detail::required_field<std::string>(tensors[i], "layer", where);
    ref.file = detail::required_field<std::string>(tensors[i], "file", where);
    const auto samples = detail::required_field<long long>(tensors[i], "samples", where);
    if (samples < 1) throw ValidationError("manifest: " + where + " needs at least one sample");
    ref.samples = static_cast<std::size_t>(samples);
    if (std::find(manifest.classes.begin(), manifest.classes.end(), ref.class_id) == manifest.classes.end()) {
      throw ValidationError("manifest: " + where + " names unknown class '" + ref.class_id + "'");
    }
    const LayerInfo* layer = manifest.find_layer(ref.layer_id);
    if (!layer) throw ValidationError("manifest: " + where + " names unknown layer '" + ref.layer_id + "'");
    if (manifest.find_tensor(ref.class_id, ref.layer_id)) {
      throw ValidationError("manifest: " + where + " duplicates (" + ref.class_id + ", " + ref.layer_id + ")");
    }

    ref.path = manifest.root / ref.file;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(ref.path, ec)) {
      throw IoError("manifest: " + where + " references missing file " + ref.path.string());
    }
    const auto found = std::filesystem::file_size(ref.path, ec);
    if (ec) throw IoError("cannot stat " + ref.path.string());
    const auto expected = detail::expected_tensor_bytes(ref.samples, *layer);
    if (found != expected) {
      throw ValidationError("manifest: " + where + " file " + ref.path.string() + " size mismatch: expected " +
                            std::to_string(expected) + " bytes, found " + std::to_string(found));
    }
    manifest.tensors.push_back(std::move(ref));
  }
  return manifest;
}

/// Reads every sample of one channel. Negative or non-finite values are
/// rejected with the sample index and grid position.
inline ClassUnitStack load_class_stack(const DatasetManifest& manifest, const std::string& class_id,
                                       const std::string& layer_id, std::size_t channel_id) {
  const LayerInfo* layer = manifest.find_layer(layer_id);
  if (!layer) throw ValidationError("unknown layer '" + layer_id + "'");
  if (channel_id >= layer->channels) {
    throw ValidationError("unknown channel " + std::to_string(channel_id) + " in layer '" + layer_id + "' (" +
                          std::to_string(layer->channels) + " channels)");
  }
  const TensorRef* ref = manifest.find_tensor(class_id, layer_id);
  if (!ref) throw ValidationError("no tensor for class '" + class_id + "' in layer '" + layer_id + "'");

  std::ifstream in(ref->path, std::ios::binary);
  if (!in) throw IoError("cannot open " + ref->path.string());

  const std::size_t m = layer->side;
  const std::size_t cells = m * m;
  std::vector<unsigned char> buffer(cells * 4);
  std::vector<ActivationUnit> units;
  units.reserve(ref->samples);
  for (std::size_t s = 0; s < ref->samples; ++s) {
    const auto offset = static_cast<std::streamoff>(((s * layer->channels + channel_id) * cells) * 4);
    in.seekg(offset);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (!in) throw IoError("short read in " + ref->path.string());
    std::vector<double> values(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      const float v = detail::decode_f32le(&buffer[i * 4]);
      if (!(v >= 0.0f)) {
        throw ValidationError("negative or non-finite activation in " + ref->path.string() + " (class '" +
                              class_id + "', layer '" + layer_id + "', channel " + std::to_string(channel_id) +
                              ") at sample " + std::to_string(s) + ", position (" + std::to_string(i / m) + ", " +
                              std::to_string(i % m) + ")");
      }
      values[i] = static_cast<double>(v);
    }
    units.emplace_back(m, std::move(values));
  }
  return ClassUnitStack(class_id, layer_id, channel_id, std::move(units));
}

/// Writes tensors and, on finish(), the manifest that references them.
/// The manifest is written last so a partially written dataset never looks
/// complete.
class DatasetWriter {
 public:
  explicit DatasetWriter(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create directory " + root_.string());
  }

  void add_class(const std::string& class_id) {
    if (std::find(classes_.begin(), classes_.end(), class_id) == classes_.end()) classes_.push_back(class_id);
  }

  void add_layer(const LayerInfo& layer) { layers_.push_back(layer); }

  /// `channels[c]` holds every sample of channel c; all must share sample
  /// count and the layer side. Values are narrowed to float32.
  void add_tensor(const std::string& class_id, const std::string& layer_id, const std::string& file,
                  const std::vector<ClassUnitStack>& channels) {
    auto layer = std::find_if(layers_.begin(), layers_.end(), [&](const LayerInfo& l) { return l.id == layer_id; });
    if (layer == layers_.end()) throw ValidationError("writer: unknown layer '" + layer_id + "'");
    if (channels.size() != layer->channels) throw ValidationError("writer: channel count mismatch");
    const std::size_t samples = channels.front().sample_count();
    for (const auto& stack : channels) {
      if (stack.sample_count() != samples || stack.side() != layer->side) {
        throw ValidationError("writer: channel stacks disagree on shape");
      }
    }
    add_class(class_id);

    const auto path = root_ / file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    const std::size_t cells = layer->side * layer->side;
    std::vector<unsigned char> buffer(cells * 4);
    for (std::size_t s = 0; s < samples; ++s) {
      for (const auto& stack : channels) {
        const auto values = stack[s].values();
        for (std::size_t i = 0; i < cells; ++i) detail::encode_f32le(static_cast<float>(values[i]), &buffer[i * 4]);
        out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
      }
    }
    if (!out) throw IoError("write failed for " + path.string());
    tensors_.push_back({{"class", class_id}, {"layer", layer_id}, {"file", file}, {"samples", samples}});
  }

  std::filesystem::path finish() const {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["classes"] = classes_;
    doc["layers"] = nlohmann::json::array();
    for (const auto& l : layers_) doc["layers"].push_back({{"id", l.id}, {"side", l.side}, {"channels", l.channels}});
    doc["tensors"] = tensors_;
    const auto path = root_ / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
    return path;
  }

 private:
  std::filesystem::path root_;
  std::vector<std::string> classes_;
  std::vector<LayerInfo> layers_;
  nlohmann::json tensors_ = nlohmann::json::array();
};

}  // namespace featent
