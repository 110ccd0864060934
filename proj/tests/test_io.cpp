#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "featent/io.hpp"
#include "test_support.hpp"

using namespace featent;
using featent::testing::TempDir;

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

void write_floats(const fs::path& p, const std::vector<float>& values) {
  std::ofstream out(p, std::ios::binary);
  for (float v : values) {
    unsigned char b[4];
    detail::encode_f32le(v, b);
    out.write(reinterpret_cast<const char*>(b), 4);
  }
}

const char* kOneLayer = R"({
  "version": 1,
  "classes": ["cat"],
  "layers": [{"id": "conv5_3", "side": 4, "channels": 2}],
  "tensors": [{"class": "cat", "layer": "conv5_3", "file": "cat.f32", "samples": 3}]
})";

// Value at (sample, channel, row, col) is unique and exactly representable.
float pattern(std::size_t s, std::size_t c, std::size_t r, std::size_t k) {
  return static_cast<float>(s * 1000 + c * 100 + r * 10 + k);
}

std::vector<float> pattern_tensor() {
  std::vector<float> v;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < 4; ++k) v.push_back(pattern(s, c, r, k));
  return v;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("float32 encoding is little-endian", "[io]") {
  unsigned char b[4];
  detail::encode_f32le(1.0f, b);
  CHECK(b[0] == 0x00);
  CHECK(b[1] == 0x00);
  CHECK(b[2] == 0x80);
  CHECK(b[3] == 0x3f);
  CHECK(detail::decode_f32le(b) == 1.0f);
}

TEST_CASE("load_manifest reads a valid 384-byte dataset", "[io][manifest]") {
  TempDir dir("io_valid");
  write_text(dir.path() / "manifest.json", kOneLayer);
  write_floats(dir.path() / "cat.f32", pattern_tensor());
  REQUIRE(fs::file_size(dir.path() / "cat.f32") == 384);

  const auto m = load_manifest(dir.path() / "manifest.json");
  REQUIRE(m.classes == std::vector<std::string>{"cat"});
  REQUIRE(m.layers.size() == 1);
  CHECK(m.layers[0].id == "conv5_3");
  CHECK(m.layers[0].side == 4);
  CHECK(m.layers[0].channels == 2);
  REQUIRE(m.tensors.size() == 1);
  CHECK(m.tensors[0].samples == 3);
  CHECK(m.tensors[0].path == dir.path() / "cat.f32");
}

TEST_CASE("load_manifest names a missing tensor file", "[io][manifest]") {
  TempDir dir("io_missing");
  write_text(dir.path() / "manifest.json", kOneLayer);
  const auto msg = message_of([&] { load_manifest(dir.path() / "manifest.json"); });
  CHECK_THROWS_AS(load_manifest(dir.path() / "manifest.json"), IoError);
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("cat.f32"));
}

TEST_CASE("load_manifest reports the size mismatch", "[io][manifest]") {
  TempDir dir("io_short");
  write_text(dir.path() / "manifest.json", kOneLayer);
  auto values = pattern_tensor();
  values.pop_back();
  write_floats(dir.path() / "cat.f32", values);
  CHECK_THROWS_AS(load_manifest(dir.path() / "manifest.json"), ValidationError);
  const auto msg = message_of([&] { load_manifest(dir.path() / "manifest.json"); });
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("expected 384"));
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("found 380"));
}

TEST_CASE("load_manifest rejects malformed documents", "[io][manifest]") {
  TempDir dir("io_malformed");
  write_floats(dir.path() / "cat.f32", pattern_tensor());
  const auto path = dir.path() / "manifest.json";

  SECTION("missing manifest") { CHECK_THROWS_AS(load_manifest(dir.path() / "nope.json"), IoError); }
  SECTION("not JSON") {
    write_text(path, "{ version: 1");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
  SECTION("wrong version") {
    write_text(path, R"({"version": 2, "classes": [], "layers": [], "tensors": []})");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
  SECTION("missing field") {
    write_text(path, R"({"version": 1, "classes": ["cat"], "tensors": []})");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
  SECTION("unknown class") {
    write_text(path, R"({"version": 1, "classes": ["dog"],
      "layers": [{"id": "L", "side": 4, "channels": 2}],
      "tensors": [{"class": "cat", "layer": "L", "file": "cat.f32", "samples": 3}]})");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
  SECTION("unknown layer") {
    write_text(path, R"({"version": 1, "classes": ["cat"],
      "layers": [{"id": "L", "side": 4, "channels": 2}],
      "tensors": [{"class": "cat", "layer": "M", "file": "cat.f32", "samples": 3}]})");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
  SECTION("duplicate class") {
    write_text(path, R"({"version": 1, "classes": ["cat", "cat"], "layers": [], "tensors": []})");
    CHECK_THROWS_AS(load_manifest(path), ValidationError);
  }
}

TEST_CASE("load_class_stack picks out one channel", "[io][stack]") {
  TempDir dir("io_stack");
  write_text(dir.path() / "manifest.json", kOneLayer);
  write_floats(dir.path() / "cat.f32", pattern_tensor());
  const auto m = load_manifest(dir.path() / "manifest.json");

  for (std::size_t c = 0; c < 2; ++c) {
    const auto stack = load_class_stack(m, "cat", "conv5_3", c);
    REQUIRE(stack.sample_count() == 3);
    CHECK(stack.channel_id() == c);
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < 4; ++k) REQUIRE(stack[s].at(r, k) == pattern(s, c, r, k));
  }
  CHECK_THROWS_AS(load_class_stack(m, "cat", "conv5_3", 2), ValidationError);
  CHECK_THROWS_AS(load_class_stack(m, "cat", "fc7", 0), ValidationError);
  CHECK_THROWS_AS(load_class_stack(m, "dog", "conv5_3", 0), ValidationError);
}

TEST_CASE("load_class_stack locates a negative value", "[io][stack]") {
  TempDir dir("io_negative");
  write_text(dir.path() / "manifest.json", kOneLayer);
  auto values = pattern_tensor();
  // sample 1, channel 0, row 0, col 0
  values[(1 * 2 + 0) * 16] = -0.5f;
  write_floats(dir.path() / "cat.f32", values);
  const auto m = load_manifest(dir.path() / "manifest.json");

  CHECK_NOTHROW(load_class_stack(m, "cat", "conv5_3", 1));
  const auto msg = message_of([&] { load_class_stack(m, "cat", "conv5_3", 0); });
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("sample 1"));
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("position (0, 0)"));
}

TEST_CASE("load_class_stack rejects NaN", "[io][stack]") {
  TempDir dir("io_nan");
  write_text(dir.path() / "manifest.json", kOneLayer);
  auto values = pattern_tensor();
  values[2 * 16 + 5] = std::numeric_limits<float>::quiet_NaN();  // sample 1, channel 0, (1, 1)
  write_floats(dir.path() / "cat.f32", values);
  const auto m = load_manifest(dir.path() / "manifest.json");
  const auto msg = message_of([&] { load_class_stack(m, "cat", "conv5_3", 0); });
  CHECK_THAT(msg, Catch::Matchers::ContainsSubstring("position (1, 1)"));
}

TEST_CASE("DatasetWriter round-trips through the loader", "[io][writer]") {
  TempDir dir("io_writer");
  const auto a = generate_synthetic({SyntheticKind::uniform_random, 5, 4, 0.0, 1, 0.8, "a", "L", 0});
  const auto b = generate_synthetic({SyntheticKind::sparse_random, 5, 4, 0.0, 2, 0.5, "a", "L", 1});

  DatasetWriter writer(dir.path());
  writer.add_layer({"L", 5, 2});
  writer.add_tensor("a", "L", "a_L.f32", {a, b});
  const auto manifest_path = writer.finish();

  CHECK(fs::file_size(dir.path() / "a_L.f32") == 4 * 2 * 25 * 4);
  const auto m = load_manifest(manifest_path);
  CHECK(load_class_stack(m, "a", "L", 0) == a);
  CHECK(load_class_stack(m, "a", "L", 1) == b);
}

TEST_CASE("DatasetWriter rejects inconsistent channels", "[io][writer]") {
  TempDir dir("io_writer_bad");
  DatasetWriter writer(dir.path());
  writer.add_layer({"L", 5, 2});
  const auto a = generate_synthetic({SyntheticKind::uniform_random, 5, 4, 0.0, 1});
  const auto shorter = generate_synthetic({SyntheticKind::uniform_random, 5, 3, 0.0, 1});
  CHECK_THROWS_AS(writer.add_tensor("a", "L", "x.f32", {a}), ValidationError);
  CHECK_THROWS_AS(writer.add_tensor("a", "L", "x.f32", {a, shorter}), ValidationError);
  CHECK_THROWS_AS(writer.add_tensor("a", "M", "x.f32", {a, a}), ValidationError);
}
