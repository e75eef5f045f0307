#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fatt/dataset.hpp"
#include "fatt/wavelet.hpp"

using namespace fatt;
using namespace fatt::wavelet;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  harness::SplitMix64 rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = 255.0 * rng.uniform();
  return x;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  harness::SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = 255.0 * rng.uniform();
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

// Independent route for the 1-D analysis: assemble the full orthogonal
// transform matrix row by row (periodically shifted filters) and apply it.
void matrix_analysis(const std::vector<double>& x, const FilterBank& fb,
                     std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  approx.assign(n / 2, 0.0);
  detail.assign(n / 2, 0.0);
  for (std::size_t m = 0; m < n / 2; ++m) {
    std::vector<double> low_row(n, 0.0);
    std::vector<double> high_row(n, 0.0);
    for (std::size_t j = 0; j < fb.length(); ++j) {
      low_row[(2 * m + j) % n] += fb.lowpass[j];
      high_row[(2 * m + j) % n] += fb.highpass[j];
    }
    for (std::size_t k = 0; k < n; ++k) {
      approx[m] += low_row[k] * x[k];
      detail[m] += high_row[k] * x[k];
    }
  }
}

}  // namespace

TEST_CASE("db4 bank satisfies the two-scale normalization") {
  const FilterBank& fb = db4_filters();
  REQUIRE(fb.length() == 8);
  double sum = 0.0;
  for (double h : fb.lowpass) sum += h;
  CHECK(std::abs(sum - kSqrt2) < 1e-12);
}

TEST_CASE("db4 orthonormality at all even shifts") {
  const FilterBank& fb = db4_filters();
  for (int shift = 0; shift < 4; ++shift) {
    double s = 0.0;
    for (int k = 0; k < 8; ++k) {
      const int k2 = k - 2 * shift;
      if (k2 >= 0 && k2 < 8) s += fb.lowpass[k] * fb.lowpass[k2];
    }
    CHECK(std::abs(s - (shift == 0 ? 1.0 : 0.0)) < 1e-12);
  }
}

TEST_CASE("db4 has four vanishing moments") {
  const FilterBank& fb = db4_filters();
  for (int p = 0; p < 4; ++p) {
    double s = 0.0;
    for (int k = 0; k < 8; ++k)
      s += ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(static_cast<double>(k), p) * fb.lowpass[k];
    CHECK(std::abs(s) < 1e-10);
  }
}

TEST_CASE("db4 highpass follows the alternating flip") {
  const FilterBank& fb = db4_filters();
  CHECK(fb.highpass[0] == fb.lowpass[7]);
  for (int k = 0; k < 8; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    CHECK(fb.highpass[k] == sign * fb.lowpass[7 - k]);
  }
  double sum = 0.0;
  for (double g : fb.highpass) sum += g;
  CHECK(std::abs(sum) < 1e-12);
}

TEST_CASE("make_qmf on Haar gives the closed form") {
  const std::vector<double> h = {1.0 / kSqrt2, 1.0 / kSqrt2};
  const std::vector<double> g = make_qmf(h);
  CHECK(g[0] == doctest::Approx(1.0 / kSqrt2).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));
}

TEST_CASE("make_qmf twice flips the sign") {
  const FilterBank& fb = db4_filters();
  const std::vector<double> twice = make_qmf(make_qmf(fb.lowpass));
  for (int k = 0; k < 8; ++k) CHECK(twice[k] == doctest::Approx(-fb.lowpass[k]).epsilon(1e-14));
}

TEST_CASE("make_qmf rejects odd-length filters") {
  CHECK_THROWS_AS(make_qmf(std::vector<double>{0.1, 0.2, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(make_qmf(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("analyze_1d of a constant with Haar") {
  const std::vector<double> x(16, 3.5);
  const AnalysisPair out = analyze_1d(x, haar_filters());
  REQUIRE(out.approx.size() == 8);
  REQUIRE(out.detail.size() == 8);
  for (double a : out.approx) CHECK(a == doctest::Approx(3.5 * kSqrt2).epsilon(1e-14));
  for (double d : out.detail) CHECK(std::abs(d) < 1e-14);
}

TEST_CASE("analyze_1d output lengths halve") {
  const std::vector<double> x = random_signal(16, 11);
  const AnalysisPair out = analyze_1d(x, db4_filters());
  CHECK(out.approx.size() == 8);
  CHECK(out.detail.size() == 8);
}

TEST_CASE("analyze_1d agrees with the explicit transform matrix") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const std::vector<double> x = random_signal(32, seed);
    const AnalysisPair out = analyze_1d(x, db4_filters());
    std::vector<double> approx, detail;
    matrix_analysis(x, db4_filters(), approx, detail);
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(out.approx[i] == doctest::Approx(approx[i]).epsilon(1e-12));
      CHECK(out.detail[i] == doctest::Approx(detail[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("analyze_1d rejects short or odd signals") {
  CHECK_THROWS_AS(analyze_1d(std::vector<double>(6, 1.0), db4_filters()), InvalidArgument);
  CHECK_THROWS_AS(analyze_1d(std::vector<double>(15, 1.0), db4_filters()), InvalidArgument);
}

TEST_CASE("synthesize_1d closed forms") {
  SUBCASE("constant approx, zero detail, Haar") {
    const std::vector<double> a(8, 2.0 * kSqrt2);
    const std::vector<double> d(8, 0.0);
    const std::vector<double> x = synthesize_1d(a, d, haar_filters());
    REQUIRE(x.size() == 16);
    for (double v : x) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("all zero stays zero") {
    const std::vector<double> zero(8, 0.0);
    for (double v : synthesize_1d(zero, zero, db4_filters())) CHECK(v == 0.0);
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(
        synthesize_1d(std::vector<double>(8, 1.0), std::vector<double>(7, 1.0), db4_filters()),
        InvalidArgument);
  }
}

TEST_CASE("1-D perfect reconstruction round trip") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::vector<double> x = random_signal(16, 100 + seed);
    const AnalysisPair pair = analyze_1d(x, db4_filters());
    const std::vector<double> back = synthesize_1d(pair.approx, pair.detail, db4_filters());
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-10));
  }
}

TEST_CASE("dwt2_level on a constant image with Haar") {
  const double c = 7.0;
  Matrix img(8, 8, c);
  const Subbands sb = dwt2_level(img, haar_filters());
  REQUIRE(sb.ll.rows() == 4);
  REQUIRE(sb.ll.cols() == 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t col = 0; col < 4; ++col) {
      CHECK(sb.ll(r, col) == doctest::Approx(2.0 * c).epsilon(1e-14));
      CHECK(std::abs(sb.lh(r, col)) < 1e-13);
      CHECK(std::abs(sb.hl(r, col)) < 1e-13);
      CHECK(std::abs(sb.hh(r, col)) < 1e-13);
    }
}

TEST_CASE("dwt2_level halves both dimensions") {
  const Matrix img = random_matrix(256, 256, 5);
  const Subbands sb = dwt2_level(img, db4_filters());
  CHECK(sb.ll.rows() == 128);
  CHECK(sb.ll.cols() == 128);
  CHECK(sb.hh.rows() == 128);
  CHECK(sb.hh.cols() == 128);
}

TEST_CASE("dwt2_level rejects odd dimensions") {
  CHECK_THROWS_AS(dwt2_level(Matrix(15, 16), db4_filters()), InvalidArgument);
  CHECK_THROWS_AS(dwt2_level(Matrix(16, 15), db4_filters()), InvalidArgument);
}

TEST_CASE("2-D round trip through one level") {
  const Matrix img = random_matrix(16, 16, 21);
  const Subbands sb = dwt2_level(img, db4_filters());
  const Matrix back = idwt2_level(sb, db4_filters());
  CHECK(max_abs_diff(img, back) < 1e-10);
}

TEST_CASE("idwt2_level edge cases") {
  SUBCASE("all-zero subbands give a zero image") {
    Subbands sb{Matrix(4, 4), Matrix(4, 4), Matrix(4, 4), Matrix(4, 4)};
    const Matrix img = idwt2_level(sb, db4_filters());
    for (double v : img.values()) CHECK(v == 0.0);
  }
  SUBCASE("shape mismatch is rejected") {
    Subbands sb{Matrix(4, 4), Matrix(4, 4), Matrix(4, 4), Matrix(8, 4)};
    CHECK_THROWS_AS(idwt2_level(sb, db4_filters()), InvalidArgument);
  }
}

TEST_CASE("round trip of a 32x32 image through idwt2_level") {
  const Matrix img = random_matrix(32, 32, 9);
  const Matrix back = idwt2_level(dwt2_level(img, db4_filters()), db4_filters());
  CHECK(max_abs_diff(img, back) < 1e-10);
}

TEST_CASE("dwt2_level is linear") {
  const Matrix x = random_matrix(16, 16, 31);
  const Matrix y = random_matrix(16, 16, 32);
  const double a = 1.75, b = -0.5;
  Matrix combo(16, 16);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) combo(r, c) = a * x(r, c) + b * y(r, c);
  const Subbands sx = dwt2_level(x, db4_filters());
  const Subbands sy = dwt2_level(y, db4_filters());
  const Subbands sc = dwt2_level(combo, db4_filters());
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(sc.ll(r, c) == doctest::Approx(a * sx.ll(r, c) + b * sy.ll(r, c)).epsilon(1e-10));
      CHECK(sc.hh(r, c) == doctest::Approx(a * sx.hh(r, c) + b * sy.hh(r, c)).epsilon(1e-10));
    }
}

TEST_CASE("pyramid subband dimension chain for 256x256, 4 levels") {
  const Matrix img = random_matrix(256, 256, 40);
  const SubbandPyramid pyr = dwt2_pyramid(img, 4, db4_filters());
  REQUIRE(pyr.levels == 4);
  REQUIRE(pyr.details.size() == 4);
  const std::size_t expected[4] = {128, 64, 32, 16};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(pyr.details[j].lh.rows() == expected[j]);
    CHECK(pyr.details[j].lh.cols() == expected[j]);
    CHECK(pyr.details[j].hl.rows() == expected[j]);
    CHECK(pyr.details[j].hh.rows() == expected[j]);
  }
  CHECK(pyr.ll.rows() == 16);
  CHECK(pyr.ll.cols() == 16);
}

TEST_CASE("pyramid of 16x16 at one level") {
  const Matrix img = random_matrix(16, 16, 41);
  const SubbandPyramid pyr = dwt2_pyramid(img, 1, db4_filters());
  CHECK(pyr.details.size() == 1);
  CHECK(pyr.details[0].lh.rows() == 8);
  CHECK(pyr.ll.rows() == 8);
}

TEST_CASE("pyramid conserves energy") {
  const Matrix img = random_matrix(64, 64, 42);
  const SubbandPyramid pyr = dwt2_pyramid(img, 3, db4_filters());
  double energy = pyr.ll.sum_of_squares();
  for (const DetailTriple& d : pyr.details)
    energy += d.lh.sum_of_squares() + d.hl.sum_of_squares() + d.hh.sum_of_squares();
  const double input = img.sum_of_squares();
  CHECK(std::abs(energy - input) / input < 1e-9);
}

TEST_CASE("pyramid rejects infeasible level counts and names the maximum") {
  const Matrix img = random_matrix(64, 64, 43);
  CHECK(max_pyramid_levels(64, 64, db4_filters()) == 4);
  try {
    dwt2_pyramid(img, 5, db4_filters());
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("at most 4") != std::string::npos);
  }
}

TEST_CASE("full pyramid reconstruction") {
  const Matrix img = random_matrix(64, 64, 44);
  const SubbandPyramid pyr = dwt2_pyramid(img, 3, db4_filters());
  const Matrix back = idwt2_pyramid(pyr, db4_filters());
  CHECK(max_abs_diff(img, back) < 1e-8);
}
