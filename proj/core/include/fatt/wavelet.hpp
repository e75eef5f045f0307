#ifndef FATT_WAVELET_HPP
#define FATT_WAVELET_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "fatt/matrix.hpp"

namespace fatt::wavelet {

// Orthonormal two-channel analysis bank. `lowpass` is the scaling filter h,
// `highpass` the wavelet filter g = alternating flip of h. Both are 0-indexed
// and normalized so that sum(h) = sqrt(2).
struct FilterBank {
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t length() const { return lowpass.size(); }
};

// Length-8 Daubechies filter with four vanishing moments. Built once by
// spectral factorization of the product filter (minimum-phase root
// selection), so the orthonormality and moment conditions hold to machine
// precision rather than to the precision of transcribed decimals.
const FilterBank& db4_filters();

// Length-2 Haar bank. Mostly useful in tests: constants have closed forms.
const FilterBank& haar_filters();

// Alternating flip g(k) = (-1)^k h(L-1-k). Rejects odd-length input.
// Applying the flip twice yields -h for even L.
std::vector<double> make_qmf(std::span<const double> lowpass);

struct AnalysisPair {
  std::vector<double> approx;
  std::vector<double> detail;
};

// One level of 1-D analysis with periodic (circular) boundary extension:
//   approx(n) = sum_k x(k) h(k - 2n),  detail(n) = sum_k x(k) g(k - 2n)
// Requires an even signal length >= filter length; outputs are half length.
AnalysisPair analyze_1d(std::span<const double> signal, const FilterBank& fb);

// Exact inverse of analyze_1d under periodic extension:
//   x(k) = sum_n approx(n) h(k - 2n) + sum_n detail(n) g(k - 2n)
std::vector<double> synthesize_1d(std::span<const double> approx,
                                  std::span<const double> detail,
                                  const FilterBank& fb);

// One decomposition level of a 2-D image. Separable: rows are filtered and
// decimated first, then columns. Subband naming: first letter = row (x)
// direction, second = column (y) direction; lh is row-lowpass/column-highpass.
struct Subbands {
  Matrix ll;
  Matrix lh;
  Matrix hl;
  Matrix hh;
};

Subbands dwt2_level(const Matrix& image, const FilterBank& fb);

// Inverse of dwt2_level. All four subbands must have the same shape.
Matrix idwt2_level(const Subbands& subbands, const FilterBank& fb);

struct DetailTriple {
  Matrix lh;
  Matrix hl;
  Matrix hh;
};

// J-level pyramid. details[0] is level 1 (finest, side/2); details[J-1] is
// the coarsest triple (side/2^J); ll is the coarsest approximation.
struct SubbandPyramid {
  std::size_t levels = 0;
  Matrix ll;
  std::vector<DetailTriple> details;
  std::size_t original_rows = 0;
  std::size_t original_cols = 0;

  const DetailTriple& detail_level(std::size_t level) const;
};

// Recursively decomposes the ll band `levels` times. Image sides must be
// divisible by 2^levels and stay >= filter length at every level; otherwise
// the error names the maximum feasible level count.
SubbandPyramid dwt2_pyramid(const Matrix& image, std::size_t levels, const FilterBank& fb);

// Full synthesis back to the original image.
Matrix idwt2_pyramid(const SubbandPyramid& pyramid, const FilterBank& fb);

// Largest J accepted by dwt2_pyramid for a rows x cols image.
std::size_t max_pyramid_levels(std::size_t rows, std::size_t cols, const FilterBank& fb);

}  // namespace fatt::wavelet

#endif
