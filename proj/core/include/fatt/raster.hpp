#ifndef FATT_RASTER_HPP
#define FATT_RASTER_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fatt/matrix.hpp"

namespace fatt {

// 8-bit image. Gray images carry one channel, color three (RGB interleaved).
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 1;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved

  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Canonical unit of ingestion: square 8-bit grayscale.
struct Raster {
  std::uint32_t side = 0;
  std::vector<std::uint8_t> pixels;  // side * side, row-major

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[static_cast<std::size_t>(y) * side + x];
  }

  bool operator==(const Raster&) const = default;
};

// Decoders for the netpbm family: P2/P5 (PGM) and P3/P6 (PPM), maxval <= 255.
// Throws DataError on anything else.
Image decode_pnm(const std::vector<std::uint8_t>& bytes);
Image read_image_file(const std::filesystem::path& path);

// Binary PGM (P5) / PPM (P6) encoders; byte-deterministic.
std::vector<std::uint8_t> encode_pgm(const Raster& raster);
std::vector<std::uint8_t> encode_ppm(const Image& image);
void write_pgm(const std::filesystem::path& path, const Raster& raster);

// ITU-R 601 luma: round(0.299 R + 0.587 G + 0.114 B). Gray input passes
// through unchanged.
std::vector<std::uint8_t> to_grayscale(const Image& image);

// Bilinear resample of a gray image to a square side. Identity when the
// input is already square with the requested side.
Raster resize_bilinear(const std::vector<std::uint8_t>& gray, std::uint32_t width,
                       std::uint32_t height, std::uint32_t target_side);

// decode + grayscale + resize in one go.
Raster load_raster(const std::filesystem::path& path, std::uint32_t target_side);
Raster canonicalize(const Image& image, std::uint32_t target_side);

// Pixels as doubles in [0, 255].
Matrix raster_to_matrix(const Raster& raster);

}  // namespace fatt

#endif
