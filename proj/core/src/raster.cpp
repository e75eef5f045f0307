#include "fatt/raster.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fatt/errors.hpp"

namespace fatt {

namespace {

struct PnmParser {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_separators() {
    while (!eof()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  unsigned next_uint(const char* what) {
    skip_separators();
    if (eof() || !std::isdigit(bytes[pos]))
      throw DataError(std::string("pnm: expected ") + what);
    unsigned long v = 0;
    while (!eof() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 100000000UL) throw DataError(std::string("pnm: absurd ") + what);
      ++pos;
    }
    return static_cast<unsigned>(v);
  }
};

}  // namespace

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw DataError("not a pnm file");
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw DataError(std::string("unsupported pnm variant P") + kind);
  const bool color = (kind == '3' || kind == '6');
  const bool ascii = (kind == '2' || kind == '3');

  PnmParser p{bytes, 2};
  const unsigned width = p.next_uint("width");
  const unsigned height = p.next_uint("height");
  const unsigned maxval = p.next_uint("maxval");
  if (width == 0 || height == 0) throw DataError("pnm: zero dimension");
  if (maxval == 0 || maxval > 255) throw DataError("pnm: only 8-bit maxval supported");

  Image img;
  img.width = width;
  img.height = height;
  img.channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height * img.channels;
  img.pixels.resize(count);

  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = p.next_uint("sample");
      if (v > maxval) throw DataError("pnm: sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  } else {
    // Binary payload starts after exactly one whitespace byte.
    if (p.eof() || !std::isspace(static_cast<unsigned char>(bytes[p.pos])))
      throw DataError("pnm: missing separator before binary payload");
    ++p.pos;
    if (bytes.size() - p.pos < count) throw DataError("pnm: truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint8_t v = bytes[p.pos + i];
      if (v > maxval) throw DataError("pnm: sample exceeds maxval");
      img.pixels[i] = v;
    }
  }
  return img;
}

Image read_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_pnm(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const Raster& raster) {
  char header[64];
  const int n = std::snprintf(header, sizeof header, "P5\n%u %u\n255\n", raster.side, raster.side);
  std::vector<std::uint8_t> out(header, header + n);
  out.insert(out.end(), raster.pixels.begin(), raster.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  if (image.channels != 3) throw InvalidArgument("encode_ppm: need 3 channels");
  char header[64];
  const int n = std::snprintf(header, sizeof header, "P6\n%u %u\n255\n", image.width, image.height);
  std::vector<std::uint8_t> out(header, header + n);
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

void write_pgm(const std::filesystem::path& path, const Raster& raster) {
  const std::vector<std::uint8_t> bytes = encode_pgm(raster);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

std::vector<std::uint8_t> to_grayscale(const Image& image) {
  if (image.channels == 1) return image.pixels;
  if (image.channels != 3) throw InvalidArgument("to_grayscale: unsupported channel count");
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(image.width) * image.height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double r = image.pixels[i * 3 + 0];
    const double g = image.pixels[i * 3 + 1];
    const double b = image.pixels[i * 3 + 2];
    const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
    gray[i] = static_cast<std::uint8_t>(y < 0 ? 0 : (y > 255 ? 255 : y));
  }
  return gray;
}

Raster resize_bilinear(const std::vector<std::uint8_t>& gray, std::uint32_t width,
                       std::uint32_t height, std::uint32_t target_side) {
  if (width == 0 || height == 0 || gray.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgument("resize_bilinear: bad source shape");
  if (target_side == 0) throw InvalidArgument("resize_bilinear: zero target");

  Raster out;
  out.side = target_side;
  if (width == target_side && height == target_side) {
    out.pixels = gray;
    return out;
  }
  out.pixels.resize(static_cast<std::size_t>(target_side) * target_side);

  const double sx = static_cast<double>(width) / target_side;
  const double sy = static_cast<double>(height) / target_side;
  for (std::uint32_t y = 0; y < target_side; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    if (fy < 0.0) fy = 0.0;
    std::uint32_t y0 = static_cast<std::uint32_t>(fy);
    if (y0 > height - 1) y0 = height - 1;
    const std::uint32_t y1 = (y0 + 1 < height) ? y0 + 1 : y0;
    const double wy = fy - y0;
    for (std::uint32_t x = 0; x < target_side; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      if (fx < 0.0) fx = 0.0;
      std::uint32_t x0 = static_cast<std::uint32_t>(fx);
      if (x0 > width - 1) x0 = width - 1;
      const std::uint32_t x1 = (x0 + 1 < width) ? x0 + 1 : x0;
      const double wx = fx - x0;

      const double top = (1.0 - wx) * gray[static_cast<std::size_t>(y0) * width + x0] +
                         wx * gray[static_cast<std::size_t>(y0) * width + x1];
      const double bottom = (1.0 - wx) * gray[static_cast<std::size_t>(y1) * width + x0] +
                            wx * gray[static_cast<std::size_t>(y1) * width + x1];
      const long v = std::lround((1.0 - wy) * top + wy * bottom);
      out.pixels[static_cast<std::size_t>(y) * target_side + x] =
          static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
  }
  return out;
}

Raster canonicalize(const Image& image, std::uint32_t target_side) {
  return resize_bilinear(to_grayscale(image), image.width, image.height, target_side);
}

Raster load_raster(const std::filesystem::path& path, std::uint32_t target_side) {
  return canonicalize(read_image_file(path), target_side);
}

Matrix raster_to_matrix(const Raster& raster) {
  Matrix m(raster.side, raster.side);
  for (std::uint32_t y = 0; y < raster.side; ++y)
    for (std::uint32_t x = 0; x < raster.side; ++x) m(y, x) = raster.at(x, y);
  return m;
}

}  // namespace fatt
