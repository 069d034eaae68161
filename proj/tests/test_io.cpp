#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "rfm/config.hpp"
#include "rfm/error.hpp"
#include "rfm/fmap.hpp"
#include "rfm/texture.hpp"
#include "support/fixtures.hpp"

using namespace rfm;

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::vector<unsigned char> container(std::uint32_t version, const std::string& header, std::size_t payload_bytes) {
  std::vector<unsigned char> out{'F', 'M', 'A', 'P'};
  put_u32(out, version);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.resize(out.size() + payload_bytes, 0);
  return out;
}

ErrorCode decode_error(const std::vector<unsigned char>& bytes) {
  try {
    decode_fmap(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode_fmap accepted malformed input");
  return ErrorCode::io_failure;
}

PipelineConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("fmap layout") {
  const FloatMap m(3, 2, {0.0, 1.0, -2.5, 0.25, 1e-3, 7.0});
  const auto bytes = encode_fmap(m, "GLCM_Contrast");
  const std::string header = R"({"dtype":"f32le","height":2,"name":"GLCM_Contrast","width":3})";
  REQUIRE(bytes.size() == 12 + header.size() + 6 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FMAP");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == header.size());
  CHECK(std::string(bytes.begin() + 12, bytes.begin() + 12 + static_cast<long>(header.size())) == header);
  // -2.5f = 0xC0200000, little-endian.
  const std::size_t third = 12 + header.size() + 8;
  CHECK(bytes[third] == 0x00);
  CHECK(bytes[third + 2] == 0x20);
  CHECK(bytes[third + 3] == 0xC0);
}

TEST_CASE("fmap round trip is byte-identical") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FloatMap m = test::random_map(seed, 1 + static_cast<int>(seed * 7 % 40), 1 + static_cast<int>(seed * 3 % 17));
    const auto bytes = encode_fmap(m, "GLRLM_SRE");
    const NamedMap back = decode_fmap(bytes);
    CHECK(back.name == "GLRLM_SRE");
    CHECK(back.map.same_shape(m));
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(back.map.values()[i] == static_cast<double>(static_cast<float>(m.values()[i])));
    CHECK(encode_fmap(back.map, back.name) == bytes);
  }

  test::TempDir dir("fmap");
  const FloatMap m = test::random_map(42, 9, 5);
  write_fmap(dir / "a.fmap", m, "x");
  const NamedMap back = read_fmap(dir / "a.fmap");
  CHECK(encode_fmap(back.map, "x") == encode_fmap(m, "x"));
  CHECK_THROWS_AS(read_fmap(dir / "missing.fmap"), Error);
}

TEST_CASE("fmap accepts any key order") {
  const auto bytes = container(1, R"({"width":2,"name":"n","height":1,"dtype":"f32le"})", 8);
  const auto nm = decode_fmap(bytes);
  CHECK(nm.map.width() == 2);
  CHECK(nm.map.height() == 1);
}

TEST_CASE("fmap rejects malformed input") {
  const std::string good = R"({"dtype":"f32le","height":1,"name":"n","width":2})";
  CHECK(decode_error({}) == ErrorCode::malformed_file);
  auto bad_magic = container(1, good, 8);
  bad_magic[0] = 'X';
  CHECK(decode_error(bad_magic) == ErrorCode::malformed_file);
  CHECK(decode_error(container(2, good, 8)) == ErrorCode::malformed_file);
  CHECK(decode_error(container(1, good, 7)) == ErrorCode::malformed_file);
  CHECK(decode_error(container(1, good, 9)) == ErrorCode::malformed_file);
  CHECK(decode_error(container(1, "{not json", 8)) == ErrorCode::malformed_file);
  CHECK(decode_error(container(1, R"({"dtype":"f64le","height":1,"name":"n","width":2})", 8)) ==
        ErrorCode::malformed_file);
  CHECK(decode_error(container(1, R"({"dtype":"f32le","height":1,"name":"n"})", 8)) == ErrorCode::malformed_file);
  CHECK(decode_error(container(1, R"({"dtype":"f32le","height":0,"name":"n","width":2})", 0)) ==
        ErrorCode::malformed_file);
  auto truncated_header = container(1, good, 8);
  truncated_header[8] = 200;
  CHECK(decode_error(truncated_header) == ErrorCode::malformed_file);

  auto nan = container(1, good, 8);
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + nan.size() - 4, &q, 4);
  CHECK(decode_error(nan) == ErrorCode::malformed_file);
}

TEST_CASE("config defaults and parsing") {
  const PipelineConfig d = parse("");
  CHECK(d.kernel == 13);
  CHECK(d.ng == 32);
  CHECK(d.resize_width == 256);
  CHECK(d.resize_height == 256);
  CHECK(d.nmi_bins == 32);
  CHECK(d.features.size() == kFeatureCount);

  const PipelineConfig c = parse(
      "# comment\n"
      "kernel = 5\r\n"
      "\n"
      "ng=8\n"
      "resize = 128x64\n"
      "nmi_bins = 16\n"
      "features = GLRLM_SRE, GLCM_Contrast\n"
      "threads = 2\n"
      "seed = 7\n");
  CHECK(c.kernel == 5);
  CHECK(c.ng == 8);
  CHECK(c.resize_width == 128);
  CHECK(c.resize_height == 64);
  CHECK(c.nmi_bins == 16);
  CHECK(c.features == std::vector<int>{1, 21});
  CHECK(c.threads == 2);
  CHECK(c.seed == 7);
  CHECK(parse("features = glrlm").features.size() == kGlrlmFeatureCount);

  CHECK_THROWS_AS(parse("kernel = 4"), Error);
  CHECK_THROWS_AS(parse("kernel = 1"), Error);
  CHECK_THROWS_AS(parse("ng = 1"), Error);
  CHECK_THROWS_AS(parse("kernel = 5x"), Error);
  CHECK_THROWS_AS(parse("resize = 128"), Error);
  CHECK_THROWS_AS(parse("colour = red"), Error);
  CHECK_THROWS_AS(parse("kernel"), Error);
  CHECK_THROWS_AS(parse("features = GLCM_Nope"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/rfm.cfg"), Error);
}
