#include "rfm/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "rfm/error.hpp"

namespace rfm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::invalid_argument, where + ": '" + text + "' is not a valid number");
  }
  return value;
}

}  // namespace

void PipelineConfig::validate() const {
  rfm().validate();
  if (resize_width < 1 || resize_height < 1) throw Error(ErrorCode::invalid_argument, "resize target must be >= 1x1");
  if (nmi_bins < 2) throw Error(ErrorCode::invalid_argument, "nmi_bins must be >= 2");
}

PipelineConfig parse_config(std::istream& in, const std::string& source) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, where + ": expected key=value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key == "kernel") {
      cfg.kernel = parse_number<int>(value, where);
    } else if (key == "ng") {
      cfg.ng = parse_number<int>(value, where);
    } else if (key == "resize") {
      const auto x = value.find('x');
      if (x == std::string::npos) throw Error(ErrorCode::invalid_argument, where + ": resize must be WxH");
      cfg.resize_width = parse_number<int>(value.substr(0, x), where);
      cfg.resize_height = parse_number<int>(value.substr(x + 1), where);
    } else if (key == "nmi_bins") {
      cfg.nmi_bins = parse_number<int>(value, where);
    } else if (key == "features") {
      cfg.features = parse_feature_selection(value);
    } else if (key == "threads") {
      cfg.threads = parse_number<unsigned>(value, where);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, where);
    } else {
      throw Error(ErrorCode::invalid_argument, where + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  return parse_config(in, path.string());
}

}  // namespace rfm
