#pragma once

// Uncompressed image formats: 24-bit BMP, binary PPM (P6), PGM (P5) and PBM (P4).
// Files written here read back and re-write byte for byte.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "vlpr/color.hpp"
#include "vlpr/image.hpp"

namespace vlpr::io {

using Bytes = std::vector<std::uint8_t>;

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageError("write failed for " + path.string());
}

namespace detail {

inline void put_le(Bytes& b, std::uint32_t v, int n) {
  for (int i = 0; i < n; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_le(const Bytes& b, std::size_t off, int n) {
  if (off + n > b.size()) throw ImageError("bmp: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

// PNM header tokenizer: whitespace separated, '#' comments to end of line.
struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::size_t data_offset = 0;
};

inline PnmHeader parse_pnm_header(const Bytes& b) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < b.size()) {
      if (b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
      } else if (std::isspace(b[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok.push_back(static_cast<char>(b[pos++]));
    if (tok.empty()) throw ImageError("pnm: truncated header");
    return tok;
  };
  auto next_int = [&]() {
    const std::string t = next_token();
    for (char c : t)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ImageError("pnm: bad header number '" + t + "'");
    if (t.size() > 9) throw ImageError("pnm: header number too large");
    return std::stoi(t);
  };
  PnmHeader h;
  h.magic = next_token();
  if (h.magic != "P4" && h.magic != "P5" && h.magic != "P6") throw ImageError("pnm: unsupported magic " + h.magic);
  h.width = next_int();
  h.height = next_int();
  if (h.magic != "P4") h.maxval = next_int();
  if (h.width < 1 || h.height < 1) throw ImageError("pnm: bad dimensions");
  if (h.maxval < 1 || h.maxval > 255) throw ImageError("pnm: only 8-bit maxval supported");
  if (pos >= b.size() || !std::isspace(b[pos])) throw ImageError("pnm: missing separator after header");
  h.data_offset = pos + 1;
  return h;
}

}  // namespace detail

inline Bytes encode_bmp(const RasterImage& img) {
  const std::uint32_t row = (static_cast<std::uint32_t>(img.width()) * 3 + 3) & ~3u;
  const std::uint32_t data = row * static_cast<std::uint32_t>(img.height());
  Bytes b;
  b.reserve(54 + data);
  b.push_back('B');
  b.push_back('M');
  detail::put_le(b, 54 + data, 4);
  detail::put_le(b, 0, 4);
  detail::put_le(b, 54, 4);
  detail::put_le(b, 40, 4);
  detail::put_le(b, static_cast<std::uint32_t>(img.width()), 4);
  detail::put_le(b, static_cast<std::uint32_t>(img.height()), 4);
  detail::put_le(b, 1, 2);
  detail::put_le(b, 24, 2);
  detail::put_le(b, 0, 4);
  detail::put_le(b, data, 4);
  detail::put_le(b, 2835, 4);
  detail::put_le(b, 2835, 4);
  detail::put_le(b, 0, 4);
  detail::put_le(b, 0, 4);
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& p = img.at(x, y);
      b.push_back(p.b);
      b.push_back(p.g);
      b.push_back(p.r);
    }
    for (std::uint32_t pad = static_cast<std::uint32_t>(img.width()) * 3; pad < row; ++pad) b.push_back(0);
  }
  return b;
}

inline RasterImage decode_bmp(const Bytes& b) {
  if (b.size() < 54 || b[0] != 'B' || b[1] != 'M') throw ImageError("bmp: bad signature");
  const std::uint32_t offset = detail::get_le(b, 10, 4);
  const std::uint32_t info = detail::get_le(b, 14, 4);
  if (info < 40) throw ImageError("bmp: unsupported info header");
  const auto width = static_cast<std::int32_t>(detail::get_le(b, 18, 4));
  const auto raw_height = static_cast<std::int32_t>(detail::get_le(b, 22, 4));
  const std::uint32_t bpp = detail::get_le(b, 28, 2);
  const std::uint32_t compression = detail::get_le(b, 30, 4);
  if (bpp != 24 || compression != 0) throw ImageError("bmp: only uncompressed 24-bit supported");
  const bool top_down = raw_height < 0;
  const int height = top_down ? -raw_height : raw_height;
  if (width < 1 || height < 1) throw ImageError("bmp: bad dimensions");
  const std::size_t row = (static_cast<std::size_t>(width) * 3 + 3) & ~std::size_t{3};
  if (offset + row * height > b.size()) throw ImageError("bmp: truncated pixel data");
  RasterImage img(width, height);
  for (int r = 0; r < height; ++r) {
    const int y = top_down ? r : height - 1 - r;
    const std::size_t base = offset + row * r;
    for (int x = 0; x < width; ++x) {
      const std::size_t o = base + 3 * static_cast<std::size_t>(x);
      img.at(x, y) = {b[o + 2], b[o + 1], b[o]};
    }
  }
  return img;
}

inline Bytes encode_ppm(const RasterImage& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  Bytes b(header.begin(), header.end());
  b.reserve(header.size() + img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    b.push_back(p.r);
    b.push_back(p.g);
    b.push_back(p.b);
  }
  return b;
}

/// Gray output: the red channel is written, so gray images from decode_pnm
/// re-encode exactly. Color images should go through to_gray first.
inline Bytes encode_pgm(const RasterImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  Bytes b(header.begin(), header.end());
  for (const Rgb& p : img.pixels()) b.push_back(p.r);
  return b;
}

/// P5 and P6 to RGB. Gray samples are replicated into all three channels.
inline RasterImage decode_pnm(const Bytes& b) {
  const detail::PnmHeader h = detail::parse_pnm_header(b);
  if (h.magic == "P4") throw ImageError("pnm: P4 is a bitmap; use decode_pbm");
  if (h.maxval != 255) throw ImageError("pnm: only maxval 255 supported");
  const std::size_t channels = h.magic == "P6" ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * channels;
  if (h.data_offset + need > b.size()) throw ImageError("pnm: truncated pixel data");
  RasterImage img(h.width, h.height);
  std::size_t o = h.data_offset;
  for (Rgb& p : img.pixels()) {
    if (channels == 3) {
      p = {b[o], b[o + 1], b[o + 2]};
      o += 3;
    } else {
      p = {b[o], b[o], b[o]};
      ++o;
    }
  }
  return img;
}

/// PBM bit 1 (black ink) maps to foreground.
inline Bytes encode_pbm(const BinaryImage& img) {
  const std::string header = "P4\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
  Bytes b(header.begin(), header.end());
  const int row_bytes = (img.width() + 7) / 8;
  for (int y = 0; y < img.height(); ++y) {
    for (int i = 0; i < row_bytes; ++i) {
      std::uint8_t byte = 0;
      for (int bit = 0; bit < 8; ++bit) {
        const int x = i * 8 + bit;
        if (x < img.width() && img.get(x, y)) byte |= static_cast<std::uint8_t>(0x80 >> bit);
      }
      b.push_back(byte);
    }
  }
  return b;
}

inline BinaryImage decode_pbm(const Bytes& b) {
  const detail::PnmHeader h = detail::parse_pnm_header(b);
  if (h.magic != "P4") throw ImageError("pbm: expected P4");
  const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
  if (h.data_offset + row_bytes * h.height > b.size()) throw ImageError("pbm: truncated bitmap");
  BinaryImage img(h.width, h.height);
  for (int y = 0; y < h.height; ++y)
    for (int x = 0; x < h.width; ++x) {
      const std::uint8_t byte = b[h.data_offset + row_bytes * y + x / 8];
      img.set(x, y, (byte >> (7 - x % 8)) & 1);
    }
  return img;
}

/// Sniffs BMP / P5 / P6 by magic bytes.
inline RasterImage decode_image(const Bytes& b) {
  if (b.size() >= 2 && b[0] == 'B' && b[1] == 'M') return decode_bmp(b);
  if (b.size() >= 2 && b[0] == 'P' && (b[1] == '5' || b[1] == '6')) return decode_pnm(b);
  throw ImageError("unrecognized image format");
}

inline RasterImage read_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

/// Format chosen by extension: .bmp, .pgm, anything else PPM.
inline void write_image(const std::filesystem::path& path, const RasterImage& img) {
  const std::string ext = path.extension().string();
  if (ext == ".bmp") write_file(path, encode_bmp(img));
  else if (ext == ".pgm") write_file(path, encode_pgm(img));
  else write_file(path, encode_ppm(img));
}

inline BinaryImage read_pbm(const std::filesystem::path& path) { return decode_pbm(read_file(path)); }
inline void write_pbm(const std::filesystem::path& path, const BinaryImage& img) { write_file(path, encode_pbm(img)); }

}  // namespace vlpr::io
