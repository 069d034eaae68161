#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfm/image.hpp"

namespace rfm {

/// FMAP container, version 1:
///
///   offset 0   "FMAP"
///   offset 4   u32 LE version (1)
///   offset 8   u32 LE header length N
///   offset 12  N bytes of UTF-8 JSON {"dtype":"f32le","height":H,"name":S,"width":W}
///   then       W*H little-endian IEEE-754 binary32 values, row-major
///
/// The writer emits the JSON compactly with sorted keys; readers accept any
/// key order. No bytes may follow the payload.
struct NamedMap {
  std::string name;
  FloatMap map;
};

inline constexpr std::uint32_t kFmapVersion = 1;

std::vector<unsigned char> encode_fmap(const FloatMap& map, std::string_view name);
NamedMap decode_fmap(std::span<const unsigned char> bytes, const std::string& source = "<memory>");

void write_fmap(const std::filesystem::path& path, const FloatMap& map, std::string_view name);
NamedMap read_fmap(const std::filesystem::path& path);

}  // namespace rfm
