// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/image_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace voxprior {

namespace {

std::uint32_t crc32(const std::uint8_t* data, size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  crc ^= 0xFFFFFFFFu;
  for (size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const std::uint8_t* data, size_t len) {
  std::uint32_t a = 1, b = 0;
  for (size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return (b << 16) | a;
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xFF);
  out.push_back((v >> 16) & 0xFF);
  out.push_back((v >> 8) & 0xFF);
  out.push_back(v & 0xFF);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  const size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  put_u32_be(out, crc32(out.data() + start, out.size() - start));
}

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace

void write_png(const std::string& path, const Image& image) {
  if (image.channels() < 3) throw ArgumentError("write_png: need 3 channels");

  // Raw scanlines: filter byte 0 followed by RGB bytes.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<size_t>(image.height) * (1 + image.width * 3));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    for (int x = 0; x < image.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::min(std::max(image.at(x, y, c), 0.0), 1.0);
        raw.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
      }
  }

  // zlib stream with stored deflate blocks.
  std::vector<std::uint8_t> idat;
  idat.push_back(0x78);
  idat.push_back(0x01);
  size_t offset = 0;
  while (offset < raw.size()) {
    const size_t n = std::min<size_t>(65535, raw.size() - offset);
    const bool final = offset + n == raw.size();
    idat.push_back(final ? 1 : 0);
    idat.push_back(n & 0xFF);
    idat.push_back((n >> 8) & 0xFF);
    idat.push_back(~n & 0xFF);
    idat.push_back((~n >> 8) & 0xFF);
    idat.insert(idat.end(), raw.begin() + offset, raw.begin() + offset + n);
    offset += n;
  }
  put_u32_be(idat, adler32(raw.data(), raw.size()));

  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, image.width);
  put_u32_be(ihdr, image.height);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);

  std::vector<std::uint8_t> file(kSignature, kSignature + 8);
  append_chunk(file, "IHDR", ihdr);
  append_chunk(file, "IDAT", idat);
  append_chunk(file, "IEND", {});

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_png: cannot open " + path);
  os.write(reinterpret_cast<const char*>(file.data()), file.size());
  if (!os) throw IoError("write_png: write failed for " + path);
}

Image read_png(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_png: cannot open " + path);
  std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (file.size() < 8 || std::memcmp(file.data(), kSignature, 8) != 0)
    throw IoError("read_png: not a PNG: " + path);

  auto read_u32 = [&](size_t pos) -> std::uint32_t {
    if (pos + 4 > file.size()) throw IoError("read_png: truncated: " + path);
    return (std::uint32_t(file[pos]) << 24) | (std::uint32_t(file[pos + 1]) << 16) |
           (std::uint32_t(file[pos + 2]) << 8) | std::uint32_t(file[pos + 3]);
  };

  int width = 0, height = 0;
  std::vector<std::uint8_t> idat;
  size_t pos = 8;
  while (pos + 8 <= file.size()) {
    const std::uint32_t len = read_u32(pos);
    const std::string type(file.begin() + pos + 4, file.begin() + pos + 8);
    const size_t data_pos = pos + 8;
    if (data_pos + len + 4 > file.size()) throw IoError("read_png: truncated: " + path);
    if (type == "IHDR") {
      width = static_cast<int>(read_u32(data_pos));
      height = static_cast<int>(read_u32(data_pos + 4));
      if (file[data_pos + 8] != 8 || file[data_pos + 9] != 2)
        throw IoError("read_png: only 8-bit RGB is supported: " + path);
    } else if (type == "IDAT") {
      idat.insert(idat.end(), file.begin() + data_pos, file.begin() + data_pos + len);
    } else if (type == "IEND") {
      break;
    }
    pos = data_pos + len + 4;
  }
  if (width <= 0 || height <= 0 || idat.size() < 6)
    throw IoError("read_png: missing image data: " + path);

  // Inflate stored blocks only.
  std::vector<std::uint8_t> raw;
  size_t p = 2;  // skip zlib header
  while (true) {
    if (p + 5 > idat.size()) throw IoError("read_png: truncated deflate stream");
    const std::uint8_t header = idat[p];
    if ((header & 0x06) != 0)
      throw IoError("read_png: only stored deflate blocks are supported");
    const size_t n = idat[p + 1] | (size_t(idat[p + 2]) << 8);
    p += 5;
    if (p + n > idat.size()) throw IoError("read_png: truncated deflate block");
    raw.insert(raw.end(), idat.begin() + p, idat.begin() + p + n);
    p += n;
    if (header & 1) break;
  }
  const size_t expected = static_cast<size_t>(height) * (1 + width * 3);
  if (raw.size() != expected) throw IoError("read_png: unexpected pixel data size");

  Image out(width, height, 3);
  size_t r = 0;
  for (int y = 0; y < height; ++y) {
    if (raw[r++] != 0) throw IoError("read_png: only filter 0 is supported");
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = raw[r++] / 255.0;
  }
  return out;
}

void write_pfm(const std::string& path, const Image& image) {
  if (image.channels() != 1) throw ArgumentError("write_pfm: need a single channel");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_pfm: cannot open " + path);
  os << "Pf\n" << image.width << " " << image.height << "\n-1.0\n";
  for (int y = image.height - 1; y >= 0; --y)
    for (int x = 0; x < image.width; ++x) {
      const float v = static_cast<float>(image.at(x, y, 0));
      os.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
  if (!os) throw IoError("write_pfm: write failed for " + path);
}

}  // namespace voxprior
