#include "stereoct/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace stereoct {

namespace {

[[noreturn]] void format_error(const std::string& path, const std::string& what, size_t offset) {
  std::ostringstream os;
  os << path << ": " << what << " (byte " << offset << ")";
  throw std::runtime_error(os.str());
}

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

bool is_space(uint8_t c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Netpbm token scanner: skips whitespace and '#' comments.
struct Cursor {
  const std::vector<uint8_t>& bytes;
  const std::string& path;
  size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_space_and_comments();
    if (pos >= bytes.size()) format_error(path, "unexpected end of header", pos);
    size_t start = pos;
    while (pos < bytes.size() && !is_space(bytes[pos]) && bytes[pos] != '#') ++pos;
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  }

  long int_token() {
    size_t at = pos;
    std::string t = token();
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0') format_error(path, "expected integer, got \"" + t + "\"", at);
    return v;
  }
};

float swap_float(float f) {
  uint32_t u;
  std::memcpy(&u, &f, 4);
  u = __builtin_bswap32(u);
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  const auto bytes = slurp(path);
  Cursor cur{bytes, path};
  const std::string magic = cur.token();
  if (magic != "P5") format_error(path, "unsupported magic \"" + magic + "\", want P5", 0);
  const long w = cur.int_token();
  const long h = cur.int_token();
  const size_t maxval_at = cur.pos;
  const long maxval = cur.int_token();
  if (w <= 0 || h <= 0) format_error(path, "bad dimensions", maxval_at);
  if (maxval != 255 && maxval != 65535) format_error(path, "unsupported maxval " + std::to_string(maxval), maxval_at);
  // Exactly one whitespace byte separates the header from the payload.
  if (cur.pos >= bytes.size() || !is_space(bytes[cur.pos]))
    format_error(path, "missing separator after maxval", cur.pos);
  ++cur.pos;

  const size_t npix = static_cast<size_t>(w) * h;
  const size_t bpp = maxval > 255 ? 2 : 1;
  if (bytes.size() - cur.pos < npix * bpp)
    format_error(path, "truncated payload", bytes.size());

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  const uint8_t* p = bytes.data() + cur.pos;
  const double inv = 1.0 / static_cast<double>(maxval);
  if (bpp == 1) {
    for (size_t i = 0; i < npix; ++i) img.data[i] = p[i] * inv;
  } else {
    for (size_t i = 0; i < npix; ++i) {
      const unsigned v = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];  // MSB first
      img.data[i] = v * inv;
    }
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path, int maxval) {
  require(maxval == 255 || maxval == 65535, "write_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  std::vector<uint8_t> buf;
  const size_t npix = img.size();
  if (maxval == 255) {
    buf.resize(npix);
    for (size_t i = 0; i < npix; ++i)
      buf[i] = static_cast<uint8_t>(std::lround(std::clamp(img.data[i], 0.0, 1.0) * 255.0));
  } else {
    buf.resize(npix * 2);
    for (size_t i = 0; i < npix; ++i) {
      const unsigned v = static_cast<unsigned>(std::lround(std::clamp(img.data[i], 0.0, 1.0) * 65535.0));
      buf[2 * i] = static_cast<uint8_t>(v >> 8);
      buf[2 * i + 1] = static_cast<uint8_t>(v & 0xff);
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

DisparityMap read_pfm(const std::string& path) {
  const auto bytes = slurp(path);
  Cursor cur{bytes, path};
  const std::string magic = cur.token();
  if (magic == "PF") format_error(path, "color PFM is unsupported, want grayscale Pf", 0);
  if (magic != "Pf") format_error(path, "unsupported magic \"" + magic + "\", want Pf", 0);
  const long w = cur.int_token();
  const long h = cur.int_token();
  const size_t scale_at = cur.pos;
  const std::string scale_tok = cur.token();
  char* end = nullptr;
  const double scale = std::strtod(scale_tok.c_str(), &end);
  if (end == scale_tok.c_str() || *end != '\0' || scale == 0.0)
    format_error(path, "bad scale line \"" + scale_tok + "\"", scale_at);
  if (w < 0 || h < 0) format_error(path, "bad dimensions", scale_at);
  if (cur.pos >= bytes.size() || !is_space(bytes[cur.pos]))
    format_error(path, "missing separator after scale", cur.pos);
  ++cur.pos;

  const bool little_endian = scale < 0.0;
  const size_t npix = static_cast<size_t>(w) * h;
  if (bytes.size() - cur.pos < npix * 4) format_error(path, "truncated payload", bytes.size());

  DisparityMap map(static_cast<int>(w), static_cast<int>(h));
  const uint8_t* p = bytes.data() + cur.pos;
  // PFM stores rows bottom-up; flip to top-down.
  for (long row = 0; row < h; ++row) {
    const long src_row = h - 1 - row;
    for (long x = 0; x < w; ++x) {
      float f;
      std::memcpy(&f, p + (static_cast<size_t>(src_row) * w + x) * 4, 4);
      if (!little_endian) f = swap_float(f);
      const double d = static_cast<double>(f);
      const bool ok = std::isfinite(d) && d >= 0.0;
      map.at(static_cast<int>(x), static_cast<int>(row)) = ok ? d : 0.0;
      map.set_valid(static_cast<int>(x), static_cast<int>(row), ok);
    }
  }
  return map;
}

void write_pfm(const DisparityMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "Pf\n" << map.width << " " << map.height << "\n-1.0\n";
  std::vector<uint8_t> buf(static_cast<size_t>(map.width) * map.height * 4);
  for (int row = 0; row < map.height; ++row) {
    const int dst_row = map.height - 1 - row;
    for (int x = 0; x < map.width; ++x) {
      const float f = map.valid_at(x, row) ? static_cast<float>(map.at(x, row)) : -1.0f;
      std::memcpy(buf.data() + (static_cast<size_t>(dst_row) * map.width + x) * 4, &f, 4);
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_pfm_raw(const std::vector<double>& values, int width, int height,
                   const std::string& path) {
  require(values.size() == static_cast<size_t>(width) * height, "write_pfm_raw: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "Pf\n" << width << " " << height << "\n-1.0\n";
  std::vector<uint8_t> buf(values.size() * 4);
  for (int row = 0; row < height; ++row) {
    const int dst_row = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      const float f = static_cast<float>(values[static_cast<size_t>(row) * width + x]);
      std::memcpy(buf.data() + (static_cast<size_t>(dst_row) * width + x) * 4, &f, 4);
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<double> read_pfm_raw(const std::string& path, int& width, int& height) {
  const auto bytes = slurp(path);
  Cursor cur{bytes, path};
  const std::string magic = cur.token();
  if (magic != "Pf") format_error(path, "unsupported magic \"" + magic + "\", want Pf", 0);
  const long w = cur.int_token();
  const long h = cur.int_token();
  const size_t scale_at = cur.pos;
  const std::string scale_tok = cur.token();
  char* end = nullptr;
  const double scale = std::strtod(scale_tok.c_str(), &end);
  if (end == scale_tok.c_str() || *end != '\0' || scale == 0.0)
    format_error(path, "bad scale line \"" + scale_tok + "\"", scale_at);
  if (cur.pos >= bytes.size() || !is_space(bytes[cur.pos]))
    format_error(path, "missing separator after scale", cur.pos);
  ++cur.pos;

  const bool little_endian = scale < 0.0;
  const size_t npix = static_cast<size_t>(w) * h;
  if (bytes.size() - cur.pos < npix * 4) format_error(path, "truncated payload", bytes.size());

  width = static_cast<int>(w);
  height = static_cast<int>(h);
  std::vector<double> values(npix);
  const uint8_t* p = bytes.data() + cur.pos;
  for (long row = 0; row < h; ++row) {
    const long src_row = h - 1 - row;
    for (long x = 0; x < w; ++x) {
      float f;
      std::memcpy(&f, p + (static_cast<size_t>(src_row) * w + x) * 4, 4);
      if (!little_endian) f = swap_float(f);
      values[static_cast<size_t>(row) * w + x] = static_cast<double>(f);
    }
  }
  return values;
}

DisparityMap read_kitti_disparity(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error(path + ": cannot open");
  uint8_t sig[8];
  if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    std::fclose(fp);
    format_error(path, "not a PNG file", 0);
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error(path + ": libpng init failed");
  }
  std::vector<std::vector<uint8_t>> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error(path + ": PNG decode failed");
  }
  png_init_io(png, fp);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error(path + ": unsupported PNG, want 16-bit single-channel grayscale");
  }

  rows.assign(h, std::vector<uint8_t>(png_get_rowbytes(png, info)));
  std::vector<png_bytep> row_ptrs(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows[y].data();
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  DisparityMap map(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    const uint8_t* r = rows[y].data();
    for (png_uint_32 x = 0; x < w; ++x) {
      const unsigned raw = (static_cast<unsigned>(r[2 * x]) << 8) | r[2 * x + 1];  // PNG is big-endian
      map.at(static_cast<int>(x), static_cast<int>(y)) = raw / 256.0;
      map.set_valid(static_cast<int>(x), static_cast<int>(y), raw != 0);
    }
  }
  return map;
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

GrayImage to_gray(const std::vector<double>& r, const std::vector<double>& g,
                  const std::vector<double>& b, int width, int height) {
  const size_t npix = static_cast<size_t>(width) * height;
  require(r.size() == npix && g.size() == npix && b.size() == npix,
          "to_gray: channel size mismatch");
  GrayImage img(width, height);
  for (size_t i = 0; i < npix; ++i) img.data[i] = luma(r[i], g[i], b[i]);
  return img;
}

void write_mask_pgm(const Mask& mask, const std::string& path) {
  GrayImage img(mask.width, mask.height);
  for (size_t i = 0; i < mask.data.size(); ++i) img.data[i] = mask.data[i] ? 1.0 : 0.0;
  write_pgm(img, path, 255);
}

Mask read_mask_pgm(const std::string& path) {
  const GrayImage img = read_pgm(path);
  Mask mask(img.width, img.height);
  for (size_t i = 0; i < img.data.size(); ++i) mask.data[i] = img.data[i] > 0.5 ? 1 : 0;
  return mask;
}

void write_ppm(const std::vector<uint8_t>& rgb, int width, int height, const std::string& path) {
  require(rgb.size() == static_cast<size_t>(width) * height * 3, "write_ppm: buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

void render_disparity_ppm(const DisparityMap& map, int max_disp, const std::string& path) {
  require(max_disp >= 1, "max_disp must be >= 1");
  std::vector<uint8_t> rgb(static_cast<size_t>(map.width) * map.height * 3, 0);
  const double denom = max_disp > 1 ? max_disp - 1.0 : 1.0;
  auto channel = [](double v) {
    return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (size_t i = 0; i < map.data.size(); ++i) {
    if (!map.valid[i]) continue;  // invalid stays black
    const double t = std::clamp(map.data[i] / denom, 0.0, 1.0);
    rgb[3 * i + 0] = channel(1.5 - std::abs(4.0 * t - 3.0));
    rgb[3 * i + 1] = channel(1.5 - std::abs(4.0 * t - 2.0));
    rgb[3 * i + 2] = channel(1.5 - std::abs(4.0 * t - 1.0));
  }
  write_ppm(rgb, map.width, map.height, path);
}

}  // namespace stereoct
