#include "sbinterp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <vector>

namespace sbi {

namespace {

double luminance(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

class PnmReader {
 public:
  PnmReader(std::vector<unsigned char> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  // Next whitespace-delimited header token, skipping '#' comments.
  long next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) fail("header value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
    ++pos_;
  }

  unsigned next_binary(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (pos_ + need > bytes_.size()) fail("truncated pixel data");
    unsigned v = bytes_[pos_++];
    if (wide) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw Error(name_ + ": " + what); }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::vector<unsigned char> bytes_;
  std::string name_;
  std::size_t pos_ = 2;
};

Image decode_pnm(std::vector<unsigned char> bytes, const std::string& name) {
  const char kind = static_cast<char>(bytes[1]);
  const bool binary = kind == '5' || kind == '6';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  PnmReader in(std::move(bytes), name);
  const long width = in.next_int();
  const long height = in.next_int();
  const long maxval = in.next_int();
  if (width < 1 || height < 1 || width * height > (1L << 28)) in.fail("bad dimensions");
  if (maxval < 1 || maxval > 65535) in.fail("bad maxval");
  if (binary) in.end_header();

  const bool wide = maxval > 255;
  const double scale = 255.0 / static_cast<double>(maxval);
  std::vector<double> data(static_cast<std::size_t>(width * height));
  for (auto& px : data) {
    double ch[3];
    for (int k = 0; k < channels; ++k) {
      const long v = binary ? static_cast<long>(in.next_binary(wide)) : in.next_int();
      if (v > maxval) in.fail("sample exceeds maxval");
      ch[k] = static_cast<double>(v) * scale;
    }
    px = channels == 3 ? luminance(ch[0], ch[1], ch[2]) : ch[0];
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

Image decode_png(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::unique_ptr<std::FILE, decltype(&std::fclose)> fp(std::fopen(name.c_str(), "rb"), &std::fclose);
  if (!fp) throw Error(name + ": cannot open");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(name + ": libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(name + ": libpng initialisation failed");
  }

  // everything touched after setjmp lives out here so a longjmp skips no destructors
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(name + ": invalid PNG data");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) throw Error(name + ": unsupported PNG channel layout");
  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned char* p = pixels.data() + i * static_cast<std::size_t>(channels);
    data[i] = channels == 1 ? p[0] : luminance(p[0], p[1], p[2]);
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(name + ": cannot open");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
    return decode_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(std::move(bytes), name);
  }
  throw Error(name + ": unrecognised image format (expected PGM, PPM or PNG)");
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(img.width()));
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      row[static_cast<std::size_t>(c)] =
          static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(img(r, c), 0.0, 255.0))));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace sbi
