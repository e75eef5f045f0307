#ifndef FATT_CODING_HPP
#define FATT_CODING_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fatt/matrix.hpp"
#include "fatt/wavelet.hpp"

namespace fatt::coding {

// Which subband of a pyramid a feature comes from. `ll` is only present at
// the coarsest level.
enum class Orientation : std::uint8_t { ll = 0, lh = 1, hl = 2, hh = 3 };

const char* orientation_name(Orientation o);

struct SubbandRef {
  std::uint32_t level = 1;
  Orientation orientation = Orientation::ll;

  bool operator==(const SubbandRef&) const = default;
};

// Small square matrix summarizing one subband: entry (i,j) is the RMS of the
// coefficients in tile (i,j) of a k x k tiling (last tile absorbs the
// remainder). Entries are therefore finite and nonnegative.
struct FeatureMatrix {
  Matrix values;
  SubbandRef source;
};

FeatureMatrix extract_feature_matrix(const Matrix& subband, std::size_t block_grid,
                                     SubbandRef source = {});

// M * M^T; symmetric positive semidefinite.
Matrix gram(const Matrix& m);

// Determinant by LU with partial pivoting. Intended for the small feature
// matrices only; rejects sizes above 8.
double determinant(const Matrix& square);

// Monotone compression of a raw Gram determinant onto the quantizer's range:
// scale * log10(1 + d), clipped to [0, range_max]. With enabled = false the
// value passes through untouched, which is what the table conformance tests
// use.
struct Normalization {
  bool enabled = true;
  double scale = 10.0;
  double range_max = 160.0;
};

double normalize_det(double det, const Normalization& norm);

// Quantizer table: `boundaries` are the B-1 ascending interval tops, so the
// intervals are [0, b0], (b0, b1], ..., (b_{B-2}, inf). `codes[i]` is the
// digit emitted for interval i.
struct CodeTable {
  std::vector<double> boundaries;
  std::vector<int> codes;
  int branching = 0;

  // B equal intervals of the given width with identity codes 0..B-1.
  static CodeTable uniform(int branching, double width = 10.0);
  void validate() const;
};

int quantize_code(double value, const CodeTable& table);

// Fixed-length digit string addressing one leaf of the tree. Digits render
// as zero-padded decimal groups ("00".."15" for branching 16), concatenated
// in order, e.g. {12, 23, 0} -> "122300".
struct IndexCode {
  std::vector<int> digits;

  bool operator==(const IndexCode&) const = default;
};

// Zero-padded group width used when rendering digits for a branching factor.
int digit_render_width(int branching);
std::string render_code(const IndexCode& code, int branching);
IndexCode parse_code(std::string_view text, int branching, std::size_t depth);

// Full coding configuration: which subbands feed which digit, plus the
// quantizer. `depth` digits are produced, one per selection entry.
struct CodingConfig {
  int branching = 16;
  std::size_t depth = 6;
  std::size_t block_grid = 3;   // k: feature matrices are k x k
  std::uint32_t levels = 4;     // pyramid depth J
  std::vector<SubbandRef> selection;
  Normalization normalization;
  CodeTable table;

  static CodingConfig defaults();
  // Coarse-to-fine selection of `depth` subbands for a J-level pyramid.
  static std::vector<SubbandRef> default_selection(std::size_t depth, std::uint32_t levels);

  std::size_t feature_length() const { return depth * block_grid * block_grid; }
  void validate() const;
};

struct CodeResult {
  IndexCode code;
  std::vector<double> features;  // concatenated feature-matrix entries, row-major
};

// Runs extract -> gram -> determinant -> normalize -> quantize per selected
// subband, concatenating digits coarse-to-fine in selection order.
CodeResult image_code(const wavelet::SubbandPyramid& pyramid, const CodingConfig& cfg);

}  // namespace fatt::coding

#endif
