#include "rfm/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <png.h>

#include "rfm/error.hpp"

namespace rfm {

namespace {

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed for '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed for '" + path.string() + "'");
}

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// ---- PNG ------------------------------------------------------------------

struct MemoryReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + count > reader->size) png_error(png, "truncated stream");
  std::memcpy(out, reader->data + reader->offset, count);
  reader->offset += count;
}

void png_write_to_memory(png_structp png, png_bytep data, png_size_t count) {
  auto* sink = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
  sink->insert(sink->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

// Decodes an 8-bit gray PNG whose header has already been checked.
// Returns false on any libpng error. Only trivially destructible locals live
// between setjmp and the end of the function.
bool decode_gray8(const std::vector<unsigned char>& bytes, std::vector<png_bytep>& rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, png_read_from_memory);
  png_read_info(png, info);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

GrayImage load_png(const std::vector<unsigned char>& bytes, const std::string& name) {
  // Signature (8) + IHDR length (4) + "IHDR" (4) + width, height, depth, color type.
  if (bytes.size() < 33 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' has a malformed PNG header");
  }
  const std::uint32_t width = read_be32(bytes.data() + 16);
  const std::uint32_t height = read_be32(bytes.data() + 20);
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  const int interlace = bytes[28];
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorCode::non_grayscale, "'" + name + "' is not a single-channel grayscale PNG");
  }
  if (bit_depth != 8) {
    throw Error(ErrorCode::unsupported_format,
                "'" + name + "' has bit depth " + std::to_string(bit_depth) + ", expected 8");
  }
  if (interlace != 0) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' is interlaced");
  }
  if (width == 0 || height == 0 || width > (1u << 15) || height > (1u << 15)) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' has unsupported dimensions");
  }

  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  std::vector<png_bytep> rows(height);
  for (std::uint32_t y = 0; y < height; ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * width;
  if (!decode_gray8(bytes, rows)) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' could not be decoded as PNG");
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::vector<int>(raw.begin(), raw.end()));
}

// ---- PGM ------------------------------------------------------------------

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  // Next whitespace-delimited integer, skipping '#' comments.
  long next_int() {
    skip_space_and_comments();
    long value = 0;
    int digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 20)) return -1;
      ++pos_;
      ++digits;
    }
    return digits == 0 ? -1 : value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  bool consume_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) return false;
    ++pos_;
    return true;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  static bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 2;
};

GrayImage load_pgm(const std::vector<unsigned char>& bytes, const std::string& name) {
  PgmHeaderReader reader(bytes);
  const long width = reader.next_int();
  const long height = reader.next_int();
  const long maxval = reader.next_int();
  if (width <= 0 || height <= 0 || maxval <= 0 || !reader.consume_single_space()) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' has a malformed PGM header");
  }
  if (maxval > 255) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' is not an 8-bit PGM");
  }
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - reader.position() < count) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' has a truncated PGM raster");
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(reader.position());
  std::vector<int> pixels(first, first + static_cast<std::ptrdiff_t>(count));
  if (std::any_of(pixels.begin(), pixels.end(), [maxval](int v) { return v > maxval; })) {
    throw Error(ErrorCode::unsupported_format, "'" + name + "' has pixels above maxval");
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

void require_8bit(const GrayImage& img) {
  if (img.depth() > 256) throw Error(ErrorCode::invalid_argument, "image depth exceeds 8 bits");
}

// ---- B-spline -------------------------------------------------------------

constexpr double kPole = -0.26794919243112270;  // sqrt(3) - 2

// In-place cubic B-spline prefilter with whole-sample mirror boundaries.
void prefilter(std::span<double> c) {
  const std::size_t n = c.size();
  if (n < 2) return;
  const double z = kPole;
  const double gain = (1.0 - z) * (1.0 - 1.0 / z);
  for (double& v : c) v *= gain;

  // Causal initial value, exact for the mirrored infinite signal.
  double zn = z;
  const double iz = 1.0 / z;
  double z2n = std::pow(z, static_cast<double>(n - 1));
  double sum = c[0] + z2n * c[n - 1];
  z2n *= z2n * iz;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    sum += (zn + z2n) * c[k];
    zn *= z;
    z2n *= iz;
  }
  c[0] = sum / (1.0 - zn * zn);
  for (std::size_t k = 1; k < n; ++k) c[k] += z * c[k - 1];

  c[n - 1] = (z / (z * z - 1.0)) * (z * c[n - 2] + c[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;) c[k] = z * (c[k + 1] - c[k]);
}

struct Taps {
  int index[4];
  double weight[4];
};

Taps cubic_taps(double x, int n) {
  const double base = std::floor(x);
  const double t = x - base;
  const double u = 1.0 - t;
  Taps taps{};
  taps.weight[0] = u * u * u / 6.0;
  taps.weight[1] = 2.0 / 3.0 - t * t + 0.5 * t * t * t;
  taps.weight[2] = 2.0 / 3.0 - u * u + 0.5 * u * u * u;
  taps.weight[3] = t * t * t / 6.0;
  const int b = static_cast<int>(base);
  for (int k = 0; k < 4; ++k) taps.index[k] = reflect_index(b - 1 + k, n);
  return taps;
}

std::vector<Taps> axis_taps(int in, int out) {
  std::vector<Taps> taps(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (int i = 0; i < out; ++i) taps[i] = cubic_taps((i + 0.5) * scale - 0.5, in);
  return taps;
}

int round_clamp_255(double v) {
  const double r = std::round(v);
  return static_cast<int>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

// ---- GrayImage / FloatMap ---------------------------------------------------

GrayImage::GrayImage(int width, int height, std::vector<int> pixels, int depth)
    : width_(width), height_(height), depth_(depth), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "image dimensions must be >= 1");
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "image depth must be >= 1");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::dimension_mismatch, "pixel count does not match width x height");
  }
  for (int v : pixels_) {
    if (v < 0 || v >= depth) throw Error(ErrorCode::invalid_argument, "pixel value outside [0, depth)");
  }
}

GrayImage GrayImage::filled(int width, int height, int value, int depth) {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "image dimensions must be >= 1");
  return GrayImage(width, height, std::vector<int>(static_cast<std::size_t>(width) * height, value), depth);
}

int GrayImage::min_value() const noexcept { return *std::min_element(pixels_.begin(), pixels_.end()); }
int GrayImage::max_value() const noexcept { return *std::max_element(pixels_.begin(), pixels_.end()); }

FloatMap::FloatMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "map dimensions must be >= 1");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::dimension_mismatch, "value count does not match width x height");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "map values must be finite");
  }
}

FloatMap FloatMap::filled(int width, int height, double value) {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "map dimensions must be >= 1");
  return FloatMap(width, height, std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

// ---- I/O ------------------------------------------------------------------

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string name = path.string();
  static constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) return load_png(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    switch (bytes[1]) {
      case '5': return load_pgm(bytes, name);
      case '3':
      case '6': throw Error(ErrorCode::non_grayscale, "'" + name + "' is a color PPM");
      default: break;
    }
  }
  throw Error(ErrorCode::unsupported_format, "'" + name + "' is neither PNG nor binary PGM");
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
  require_8bit(img);
  const auto w = static_cast<std::size_t>(img.width());
  std::vector<unsigned char> raster(img.pixels().begin(), img.pixels().end());
  std::vector<unsigned char> encoded;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::io_failure, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::io_failure, "libpng initialisation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = raster.data() + y * w;
  volatile bool ok = false;
  if (!setjmp(png_jmpbuf(png))) {
    png_set_write_fn(png, &encoded, png_write_to_memory, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    ok = true;
  }
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorCode::io_failure, "PNG encoding failed for '" + path.string() + "'");
  write_file_bytes(path, encoded);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  require_8bit(img);
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels().begin(), img.pixels().end());
  write_file_bytes(path, bytes);
}

// ---- Preprocessing ----------------------------------------------------------

GrayImage normalize_levels(const GrayImage& img) {
  const int lo = img.min_value();
  const int hi = img.max_value();
  std::vector<int> out(img.pixels().size(), 0);
  if (hi > lo) {
    // round(255 (g - lo) / (hi - lo)) in exact integer arithmetic, halves rounded up.
    const long long span = hi - lo;
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(), [&](int g) {
      return static_cast<int>((2LL * 255 * (g - lo) + span) / (2 * span));
    });
  }
  return GrayImage(img.width(), img.height(), std::move(out), 256);
}

GrayImage resize_bspline(const GrayImage& img, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1) throw Error(ErrorCode::invalid_argument, "resize target must be >= 1x1");
  const int in_w = img.width();
  const int in_h = img.height();

  // Horizontal pass: prefilter each row, sample at the new columns.
  std::vector<double> row(static_cast<std::size_t>(in_w));
  std::vector<double> mid(static_cast<std::size_t>(out_width) * in_h);
  const auto x_taps = axis_taps(in_w, out_width);
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < in_w; ++x) row[x] = img.at(x, y);
    prefilter(row);
    for (int x = 0; x < out_width; ++x) {
      const Taps& t = x_taps[x];
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += t.weight[k] * row[t.index[k]];
      mid[static_cast<std::size_t>(y) * out_width + x] = v;
    }
  }

  // Vertical pass on the intermediate columns.
  std::vector<double> col(static_cast<std::size_t>(in_h));
  std::vector<int> out(static_cast<std::size_t>(out_width) * out_height);
  const auto y_taps = axis_taps(in_h, out_height);
  for (int x = 0; x < out_width; ++x) {
    for (int y = 0; y < in_h; ++y) col[y] = mid[static_cast<std::size_t>(y) * out_width + x];
    prefilter(col);
    for (int y = 0; y < out_height; ++y) {
      const Taps& t = y_taps[y];
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += t.weight[k] * col[t.index[k]];
      out[static_cast<std::size_t>(y) * out_width + x] = round_clamp_255(v);
    }
  }
  return GrayImage(out_width, out_height, std::move(out), 256);
}

}  // namespace rfm
