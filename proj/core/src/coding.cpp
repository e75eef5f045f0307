#include "fatt/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fatt/errors.hpp"

namespace fatt::coding {

const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::ll: return "ll";
    case Orientation::lh: return "lh";
    case Orientation::hl: return "hl";
    case Orientation::hh: return "hh";
  }
  return "?";
}

FeatureMatrix extract_feature_matrix(const Matrix& subband, std::size_t block_grid,
                                     SubbandRef source) {
  if (block_grid < 2) throw InvalidArgument("extract_feature_matrix: grid must be >= 2");
  if (subband.rows() < block_grid || subband.cols() < block_grid)
    throw InvalidArgument("extract_feature_matrix: subband " + std::to_string(subband.rows()) +
                          "x" + std::to_string(subband.cols()) + " smaller than " +
                          std::to_string(block_grid) + "x" + std::to_string(block_grid) + " grid");

  const std::size_t k = block_grid;
  const std::size_t tile_rows = subband.rows() / k;
  const std::size_t tile_cols = subband.cols() / k;

  FeatureMatrix fm;
  fm.source = source;
  fm.values = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r0 = i * tile_rows;
    const std::size_t r1 = (i + 1 == k) ? subband.rows() : (i + 1) * tile_rows;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t c0 = j * tile_cols;
      const std::size_t c1 = (j + 1 == k) ? subband.cols() : (j + 1) * tile_cols;
      double sum_sq = 0.0;
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) sum_sq += subband(r, c) * subband(r, c);
      const std::size_t count = (r1 - r0) * (c1 - c0);
      fm.values(i, j) = std::sqrt(sum_sq / static_cast<double>(count));
    }
  }
  return fm;
}

Matrix gram(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("gram: matrix must be square");
  const std::size_t n = m.rows();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m(i, k) * m(j, k);
      g(i, j) = s;
    }
  }
  return g;
}

double determinant(const Matrix& square) {
  if (square.rows() != square.cols()) throw InvalidArgument("determinant: matrix must be square");
  const std::size_t n = square.rows();
  if (n == 0) throw InvalidArgument("determinant: empty matrix");
  if (n > 8) throw InvalidArgument("determinant: supports sizes up to 8, got " + std::to_string(n));

  Matrix lu = square;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    det *= lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

double normalize_det(double det, const Normalization& norm) {
  if (det < 0.0) throw InvalidArgument("normalize_det: negative determinant");
  if (!norm.enabled) return det;
  const double v = norm.scale * std::log10(1.0 + det);
  return std::min(v, norm.range_max);
}

CodeTable CodeTable::uniform(int branching, double width) {
  if (branching < 2) throw InvalidArgument("code table needs at least 2 intervals");
  if (width <= 0.0) throw InvalidArgument("code table width must be positive");
  CodeTable t;
  t.branching = branching;
  t.boundaries.reserve(branching - 1);
  for (int i = 1; i < branching; ++i) t.boundaries.push_back(width * i);
  t.codes.resize(branching);
  for (int i = 0; i < branching; ++i) t.codes[i] = i;
  return t;
}

void CodeTable::validate() const {
  if (branching < 2) throw InvalidArgument("code table: branching must be >= 2");
  if (boundaries.size() + 1 != static_cast<std::size_t>(branching))
    throw InvalidArgument("code table: need branching-1 boundaries");
  if (codes.size() != static_cast<std::size_t>(branching))
    throw InvalidArgument("code table: need one code per interval");
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i + 1]))
      throw InvalidArgument("code table: boundaries must be strictly ascending");
  if (!boundaries.empty() && !(boundaries.front() >= 0.0))
    throw InvalidArgument("code table: boundaries must be nonnegative");
  for (int c : codes)
    if (c < 0 || c >= branching) throw InvalidArgument("code table: code out of digit range");
}

int quantize_code(double value, const CodeTable& table) {
  if (value < 0.0) throw InvalidArgument("quantize_code: negative value");
  // Intervals are left-open/right-closed; 0 belongs to the first digit.
  for (std::size_t i = 0; i < table.boundaries.size(); ++i)
    if (value <= table.boundaries[i]) return table.codes[i];
  return table.codes.back();
}

int digit_render_width(int branching) {
  int width = 1;
  for (int top = branching - 1; top >= 10; top /= 10) ++width;
  return std::max(width, 2);
}

std::string render_code(const IndexCode& code, int branching) {
  const int width = digit_render_width(branching);
  std::string out;
  out.reserve(code.digits.size() * static_cast<std::size_t>(width));
  char buf[16];
  for (int d : code.digits) {
    if (d < 0 || d >= branching)
      throw InvalidArgument("render_code: digit " + std::to_string(d) +
                            " out of range for branching " + std::to_string(branching));
    std::snprintf(buf, sizeof buf, "%0*d", width, d);
    out += buf;
  }
  return out;
}

IndexCode parse_code(std::string_view text, int branching, std::size_t depth) {
  const std::size_t width = static_cast<std::size_t>(digit_render_width(branching));
  if (text.size() != width * depth)
    throw InvalidArgument("parse_code: expected " + std::to_string(width * depth) +
                          " characters, got " + std::to_string(text.size()));
  IndexCode code;
  code.digits.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    int value = 0;
    for (std::size_t j = 0; j < width; ++j) {
      const char c = text[i * width + j];
      if (c < '0' || c > '9') throw InvalidArgument("parse_code: non-digit character");
      value = value * 10 + (c - '0');
    }
    if (value >= branching)
      throw InvalidArgument("parse_code: digit " + std::to_string(value) +
                            " out of range for branching " + std::to_string(branching));
    code.digits.push_back(value);
  }
  return code;
}

std::vector<SubbandRef> CodingConfig::default_selection(std::size_t depth, std::uint32_t levels) {
  // Coarsest bands lead: the global approximation discriminates at the top
  // tree levels, finer details refine below.
  std::vector<SubbandRef> sel;
  sel.push_back({levels, Orientation::ll});
  for (std::uint32_t level = levels; level >= 1 && sel.size() < depth; --level) {
    for (Orientation o : {Orientation::lh, Orientation::hl, Orientation::hh}) {
      if (sel.size() == depth) break;
      sel.push_back({level, o});
    }
  }
  if (sel.size() < depth)
    throw InvalidArgument("default_selection: " + std::to_string(levels) +
                          " levels provide fewer than " + std::to_string(depth) + " subbands");
  sel.resize(depth);
  return sel;
}

CodingConfig CodingConfig::defaults() {
  CodingConfig cfg;
  cfg.selection = {{4, Orientation::ll}, {4, Orientation::lh}, {4, Orientation::hl},
                   {4, Orientation::hh}, {3, Orientation::lh}, {3, Orientation::hl}};
  cfg.table = CodeTable::uniform(cfg.branching);
  return cfg;
}

void CodingConfig::validate() const {
  if (branching < 2) throw InvalidArgument("coding config: branching must be >= 2");
  if (depth < 1) throw InvalidArgument("coding config: depth must be >= 1");
  if (block_grid < 2) throw InvalidArgument("coding config: block grid must be >= 2");
  if (levels < 1) throw InvalidArgument("coding config: levels must be >= 1");
  if (selection.size() != depth)
    throw InvalidArgument("coding config: selection lists " + std::to_string(selection.size()) +
                          " subbands for depth " + std::to_string(depth));
  for (const SubbandRef& s : selection) {
    if (s.level < 1 || s.level > levels)
      throw InvalidArgument("coding config: selection level " + std::to_string(s.level) +
                            " outside 1.." + std::to_string(levels));
    if (s.orientation == Orientation::ll && s.level != levels)
      throw InvalidArgument("coding config: ll exists only at the coarsest level");
  }
  table.validate();
  if (table.branching != branching)
    throw InvalidArgument("coding config: table branching differs from config branching");
  if (normalization.scale <= 0.0 || normalization.range_max <= 0.0)
    throw InvalidArgument("coding config: normalization scale/range must be positive");
}

namespace {

const Matrix& select_subband(const wavelet::SubbandPyramid& pyr, const SubbandRef& ref) {
  if (ref.level < 1 || ref.level > pyr.levels)
    throw InvalidArgument("image_code: pyramid has no level " + std::to_string(ref.level));
  if (ref.orientation == Orientation::ll) {
    if (ref.level != pyr.levels)
      throw InvalidArgument("image_code: ll subband exists only at level " +
                            std::to_string(pyr.levels));
    return pyr.ll;
  }
  const wavelet::DetailTriple& d = pyr.detail_level(ref.level);
  switch (ref.orientation) {
    case Orientation::lh: return d.lh;
    case Orientation::hl: return d.hl;
    case Orientation::hh: return d.hh;
    default: break;
  }
  throw InvalidArgument("image_code: bad orientation");
}

}  // namespace

CodeResult image_code(const wavelet::SubbandPyramid& pyramid, const CodingConfig& cfg) {
  cfg.validate();
  if (pyramid.levels < cfg.levels)
    throw InvalidArgument("image_code: pyramid has " + std::to_string(pyramid.levels) +
                          " levels, config needs " + std::to_string(cfg.levels));

  CodeResult result;
  result.code.digits.reserve(cfg.depth);
  result.features.reserve(cfg.feature_length());
  for (const SubbandRef& ref : cfg.selection) {
    const Matrix& band = select_subband(pyramid, ref);
    const FeatureMatrix fm = extract_feature_matrix(band, cfg.block_grid, ref);
    for (double v : fm.values.values()) result.features.push_back(v);

    double det = determinant(gram(fm.values));
    if (det < 0.0) det = 0.0;  // PSD up to rounding
    const double compressed = normalize_det(det, cfg.normalization);
    result.code.digits.push_back(quantize_code(compressed, cfg.table));
  }
  return result;
}

}  // namespace fatt::coding
