#include "rfm/fmap.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "rfm/error.hpp"

namespace rfm {

namespace {

constexpr std::size_t kPreamble = 12;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

[[noreturn]] void malformed(const std::string& source, const std::string& why) {
  throw Error(ErrorCode::malformed_file, source + ": " + why);
}

}  // namespace

std::vector<unsigned char> encode_fmap(const FloatMap& map, std::string_view name) {
  const nlohmann::json header = {
      {"width", map.width()}, {"height", map.height()}, {"name", std::string(name)}, {"dtype", "f32le"}};
  const std::string text = header.dump();

  std::vector<unsigned char> out;
  out.reserve(kPreamble + text.size() + 4 * map.size());
  for (char c : std::string_view("FMAP")) out.push_back(static_cast<unsigned char>(c));
  put_u32(out, kFmapVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (double v : map.values()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::invalid_argument, "value " + std::to_string(v) + " does not fit in a 32-bit float");
    }
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

NamedMap decode_fmap(std::span<const unsigned char> bytes, const std::string& source) {
  if (bytes.size() < kPreamble || std::memcmp(bytes.data(), "FMAP", 4) != 0) malformed(source, "not an FMAP file");
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kFmapVersion) malformed(source, "unsupported FMAP version " + std::to_string(version));
  const std::uint32_t header_len = get_u32(bytes.data() + 8);
  if (header_len > bytes.size() - kPreamble) malformed(source, "truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + kPreamble, bytes.begin() + kPreamble + header_len);
  } catch (const nlohmann::json::exception& e) {
    malformed(source, std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) malformed(source, "header must be a JSON object");
  const auto field = [&](const char* key) -> const nlohmann::json& {
    const auto it = header.find(key);
    if (it == header.end()) malformed(source, std::string("header lacks '") + key + "'");
    return *it;
  };
  const auto& width = field("width");
  const auto& height = field("height");
  const auto& name = field("name");
  const auto& dtype = field("dtype");
  if (!width.is_number_integer() || !height.is_number_integer() || !name.is_string() || !dtype.is_string()) {
    malformed(source, "header fields have wrong types");
  }
  if (dtype.get<std::string>() != "f32le") malformed(source, "unsupported dtype '" + dtype.get<std::string>() + "'");
  const auto w = width.get<long long>();
  const auto h = height.get<long long>();
  if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20)) malformed(source, "invalid dimensions");

  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t payload = bytes.size() - kPreamble - header_len;
  if (payload != 4 * count) {
    malformed(source, "payload has " + std::to_string(payload) + " bytes, expected " + std::to_string(4 * count));
  }
  std::vector<double> values(count);
  const unsigned char* p = bytes.data() + kPreamble + header_len;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    const float f = std::bit_cast<float>(get_u32(p));
    if (!std::isfinite(f)) malformed(source, "payload holds a non-finite value");
    values[i] = f;
  }
  return {name.get<std::string>(), FloatMap(static_cast<int>(w), static_cast<int>(h), std::move(values))};
}

void write_fmap(const std::filesystem::path& path, const FloatMap& map, std::string_view name) {
  const auto bytes = encode_fmap(map, name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed for '" + path.string() + "'");
}

NamedMap read_fmap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed for '" + path.string() + "'");
  return decode_fmap(bytes, path.string());
}

}  // namespace rfm
