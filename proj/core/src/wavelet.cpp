#include "fatt/wavelet.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <utility>

namespace fatt::wavelet {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Spectral factorization of the degree-3 Daubechies polynomial
// P(y) = 20y^3 + 10y^2 + 4y + 1. The minimum-phase half of its z-domain
// factorization, multiplied by ((1+z)/2)^4 and scaled by sqrt(2), is the
// length-8 scaling filter.
std::vector<double> build_db4_lowpass() {
  using cd = std::complex<double>;

  // Real root of P by Newton; P has exactly one (negative) real root.
  double r = -0.34;
  for (int i = 0; i < 64; ++i) {
    double p = ((20.0 * r + 10.0) * r + 4.0) * r + 1.0;
    double dp = (60.0 * r + 20.0) * r + 4.0;
    double next = r - p / dp;
    if (next == r) break;
    r = next;
  }

  // Deflate: P(y) = (y - r)(20y^2 + by + c), complex pair from the quadratic.
  const double b = 10.0 + 20.0 * r;
  const double c = 4.0 + r * b;
  const cd disc = std::sqrt(cd(b * b - 80.0 * c, 0.0));
  const cd roots_y[3] = {cd(r, 0.0), (-b + disc) / 40.0, (-b - disc) / 40.0};

  // Map each y-root to its z-root inside the unit circle:
  // y = -(1-z)^2 / (4z)  =>  z^2 + (4y - 2) z + 1 = 0, roots z and 1/z.
  cd roots_z[3];
  for (int i = 0; i < 3; ++i) {
    const cd B = 4.0 * roots_y[i] - 2.0;
    const cd d = std::sqrt(B * B - 4.0);
    cd z = (-B + d) / 2.0;
    const cd z_alt = (-B - d) / 2.0;
    if (std::abs(z_alt) < std::abs(z)) z = z_alt;
    for (int it = 0; it < 4; ++it)  // polish
      z -= (z * z + B * z + 1.0) / (2.0 * z + B);
    roots_z[i] = z;
  }

  // Expand sqrt(2) * ((1+z)/2)^4 * prod (z - z_i)/(1 - z_i).
  std::vector<cd> poly{cd(1.0, 0.0)};
  auto mul_linear = [&poly](cd c0, cd c1) {
    std::vector<cd> next(poly.size() + 1, cd(0.0, 0.0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i] * c0;
      next[i + 1] += poly[i] * c1;
    }
    poly = std::move(next);
  };
  for (int i = 0; i < 4; ++i) mul_linear(cd(0.5, 0.0), cd(0.5, 0.0));
  for (const cd& z : roots_z) mul_linear(-z / (1.0 - z), 1.0 / (1.0 - z));

  std::vector<double> h(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) h[i] = kSqrt2 * poly[i].real();

  // Reverse into the conventional ordering (h[0] is the largest-magnitude
  // leading tap, ~0.2304).
  std::vector<double> reversed(h.rbegin(), h.rend());
  return reversed;
}

void require_even_len(std::size_t n, std::size_t filter_len, const char* what) {
  if (n % 2 != 0)
    throw InvalidArgument(std::string(what) + " length must be even, got " + std::to_string(n));
  if (n < filter_len)
    throw InvalidArgument(std::string(what) + " length " + std::to_string(n) +
                          " is shorter than the filter (" + std::to_string(filter_len) +
                          "); periodic extension needs at least one full period");
}

}  // namespace

const FilterBank& db4_filters() {
  static const FilterBank bank = [] {
    FilterBank fb;
    fb.lowpass = build_db4_lowpass();
    fb.highpass = make_qmf(fb.lowpass);
    return fb;
  }();
  return bank;
}

const FilterBank& haar_filters() {
  static const FilterBank bank = [] {
    FilterBank fb;
    fb.lowpass = {1.0 / kSqrt2, 1.0 / kSqrt2};
    fb.highpass = make_qmf(fb.lowpass);
    return fb;
  }();
  return bank;
}

std::vector<double> make_qmf(std::span<const double> lowpass) {
  if (lowpass.empty()) throw InvalidArgument("make_qmf: empty filter");
  if (lowpass.size() % 2 != 0)
    throw InvalidArgument("make_qmf: filter length must be even, got " +
                          std::to_string(lowpass.size()));
  const std::size_t len = lowpass.size();
  std::vector<double> highpass(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    highpass[k] = sign * lowpass[len - 1 - k];
  }
  return highpass;
}

AnalysisPair analyze_1d(std::span<const double> signal, const FilterBank& fb) {
  require_even_len(signal.size(), fb.length(), "analyze_1d: signal");
  const std::size_t n = signal.size();
  const std::size_t half = n / 2;
  const std::size_t len = fb.length();

  AnalysisPair out;
  out.approx.resize(half);
  out.detail.resize(half);
  for (std::size_t m = 0; m < half; ++m) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      const double x = signal[(2 * m + j) % n];
      a += x * fb.lowpass[j];
      d += x * fb.highpass[j];
    }
    out.approx[m] = a;
    out.detail[m] = d;
  }
  return out;
}

std::vector<double> synthesize_1d(std::span<const double> approx,
                                  std::span<const double> detail,
                                  const FilterBank& fb) {
  if (approx.size() != detail.size())
    throw InvalidArgument("synthesize_1d: approx length " + std::to_string(approx.size()) +
                          " != detail length " + std::to_string(detail.size()));
  const std::size_t half = approx.size();
  const std::size_t n = half * 2;
  const std::size_t len = fb.length();

  std::vector<double> signal(n, 0.0);
  for (std::size_t m = 0; m < half; ++m) {
    const double a = approx[m];
    const double d = detail[m];
    for (std::size_t j = 0; j < len; ++j) {
      signal[(2 * m + j) % n] += a * fb.lowpass[j] + d * fb.highpass[j];
    }
  }
  return signal;
}

namespace {

// Filters every row of `m`, writing decimated lowpass/highpass halves.
void analyze_rows(const Matrix& m, const FilterBank& fb, Matrix& low, Matrix& high) {
  const std::size_t half = m.cols() / 2;
  low = Matrix(m.rows(), half);
  high = Matrix(m.rows(), half);
  std::vector<double> row(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    AnalysisPair pair = analyze_1d(row, fb);
    for (std::size_t c = 0; c < half; ++c) {
      low(r, c) = pair.approx[c];
      high(r, c) = pair.detail[c];
    }
  }
}

void analyze_cols(const Matrix& m, const FilterBank& fb, Matrix& low, Matrix& high) {
  const std::size_t half = m.rows() / 2;
  low = Matrix(half, m.cols());
  high = Matrix(half, m.cols());
  std::vector<double> col(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m(r, c);
    AnalysisPair pair = analyze_1d(col, fb);
    for (std::size_t r = 0; r < half; ++r) {
      low(r, c) = pair.approx[r];
      high(r, c) = pair.detail[r];
    }
  }
}

Matrix synthesize_cols(const Matrix& low, const Matrix& high, const FilterBank& fb) {
  Matrix out(low.rows() * 2, low.cols());
  std::vector<double> a(low.rows());
  std::vector<double> d(low.rows());
  for (std::size_t c = 0; c < low.cols(); ++c) {
    for (std::size_t r = 0; r < low.rows(); ++r) {
      a[r] = low(r, c);
      d[r] = high(r, c);
    }
    std::vector<double> col = synthesize_1d(a, d, fb);
    for (std::size_t r = 0; r < out.rows(); ++r) out(r, c) = col[r];
  }
  return out;
}

Matrix synthesize_rows(const Matrix& low, const Matrix& high, const FilterBank& fb) {
  Matrix out(low.rows(), low.cols() * 2);
  std::vector<double> a(low.cols());
  std::vector<double> d(low.cols());
  for (std::size_t r = 0; r < low.rows(); ++r) {
    for (std::size_t c = 0; c < low.cols(); ++c) {
      a[c] = low(r, c);
      d[c] = high(r, c);
    }
    std::vector<double> row = synthesize_1d(a, d, fb);
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = row[c];
  }
  return out;
}

}  // namespace

Subbands dwt2_level(const Matrix& image, const FilterBank& fb) {
  require_even_len(image.cols(), fb.length(), "dwt2_level: column count");
  require_even_len(image.rows(), fb.length(), "dwt2_level: row count");

  Matrix row_low, row_high;
  analyze_rows(image, fb, row_low, row_high);

  Subbands sb;
  Matrix tmp_low, tmp_high;
  analyze_cols(row_low, fb, tmp_low, tmp_high);
  sb.ll = std::move(tmp_low);
  sb.lh = std::move(tmp_high);
  analyze_cols(row_high, fb, tmp_low, tmp_high);
  sb.hl = std::move(tmp_low);
  sb.hh = std::move(tmp_high);
  return sb;
}

Matrix idwt2_level(const Subbands& subbands, const FilterBank& fb) {
  if (!subbands.ll.same_shape(subbands.lh) || !subbands.ll.same_shape(subbands.hl) ||
      !subbands.ll.same_shape(subbands.hh))
    throw InvalidArgument("idwt2_level: subband shapes differ");
  Matrix row_low = synthesize_cols(subbands.ll, subbands.lh, fb);
  Matrix row_high = synthesize_cols(subbands.hl, subbands.hh, fb);
  return synthesize_rows(row_low, row_high, fb);
}

const DetailTriple& SubbandPyramid::detail_level(std::size_t level) const {
  if (level < 1 || level > details.size())
    throw InvalidArgument("pyramid has no detail level " + std::to_string(level));
  return details[level - 1];
}

std::size_t max_pyramid_levels(std::size_t rows, std::size_t cols, const FilterBank& fb) {
  std::size_t levels = 0;
  while (rows % 2 == 0 && cols % 2 == 0 && rows >= fb.length() && cols >= fb.length()) {
    rows /= 2;
    cols /= 2;
    ++levels;
  }
  return levels;
}

SubbandPyramid dwt2_pyramid(const Matrix& image, std::size_t levels, const FilterBank& fb) {
  if (levels < 1) throw InvalidArgument("dwt2_pyramid: level count must be >= 1");
  const std::size_t feasible = max_pyramid_levels(image.rows(), image.cols(), fb);
  if (levels > feasible)
    throw InvalidArgument("dwt2_pyramid: " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()) + " image supports at most " +
                          std::to_string(feasible) + " levels, requested " +
                          std::to_string(levels));

  SubbandPyramid pyr;
  pyr.levels = levels;
  pyr.original_rows = image.rows();
  pyr.original_cols = image.cols();
  pyr.details.reserve(levels);

  Matrix current = image;
  for (std::size_t j = 1; j <= levels; ++j) {
    Subbands sb = dwt2_level(current, fb);
    pyr.details.push_back({std::move(sb.lh), std::move(sb.hl), std::move(sb.hh)});
    current = std::move(sb.ll);
  }
  pyr.ll = std::move(current);
  return pyr;
}

Matrix idwt2_pyramid(const SubbandPyramid& pyramid, const FilterBank& fb) {
  if (pyramid.levels == 0 || pyramid.details.size() != pyramid.levels)
    throw InvalidArgument("idwt2_pyramid: malformed pyramid");
  Matrix current = pyramid.ll;
  for (std::size_t j = pyramid.levels; j >= 1; --j) {
    const DetailTriple& d = pyramid.details[j - 1];
    Subbands sb{std::move(current), d.lh, d.hl, d.hh};
    current = idwt2_level(sb, fb);
  }
  return current;
}

}  // namespace fatt::wavelet
