#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfm/engine.hpp"

namespace rfm {

/// Pipeline settings read from flat `key = value` text. Blank lines and lines
/// starting with '#' are ignored; unknown keys are rejected.
///
///   kernel    odd window side, >= 3          (13)
///   ng        quantization levels, >= 2      (32)
///   resize    WxH preprocessing target       (256x256)
///   nmi_bins  bins per map for NMI, >= 2     (32)
///   features  all | glcm | glrlm | name,...  (all)
///   threads   extraction threads, 0 = auto   (0)
///   seed      reserved for stochastic stages (0)
struct PipelineConfig {
  int kernel = 13;
  int ng = 32;
  int resize_width = 256;
  int resize_height = 256;
  int nmi_bins = 32;
  std::vector<int> features = RfmConfig::all_features();
  unsigned threads = 0;
  std::uint64_t seed = 0;

  RfmConfig rfm() const { return RfmConfig{kernel, ng, features}; }
  void validate() const;
};

PipelineConfig parse_config(std::istream& in, const std::string& source = "<stream>");
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace rfm
