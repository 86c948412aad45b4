#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "stereoct/census.hpp"

using namespace stereoct;

namespace {

int production_bit(const CensusField& field, int x, int y, int s, int bit) {
  const auto desc = field.descriptor(x, y, s);
  return (desc[bit >> 6] >> (bit & 63)) & 1;
}

// Strictly increasing pointwise remap; gamma-like plus an offset keeps
// ordering while changing every intensity.
GrayImage remapped(const GrayImage& img, double gamma, double offset) {
  GrayImage out = img;
  for (double& v : out.data) v = std::pow(v, gamma) * 0.7 + offset + 0.1 * v;
  return out;
}

}  // namespace

TEST_CASE("3x3 descriptor worked example") {
  // Window (row-major):          bits, center 0.4 excluded, >= rule:
  //   0.1 0.5 0.3                 0 1 0
  //   0.2 0.4 0.6                 0 . 1
  //   0.9 0.0 0.4                 1 0 1   <- 0.4 >= 0.4 tie gives 1
  GrayImage img(3, 3);
  const double v[9] = {0.1, 0.5, 0.3, 0.2, 0.4, 0.6, 0.9, 0.0, 0.4};
  std::copy(v, v + 9, img.data.begin());
  const CensusField field = census_transform(img, {3});
  // LSB-first packing of 0,1,0,0,1,1,0,1
  CHECK(field.descriptor(1, 1, 0)[0] == 0xb2);

  const std::vector<int> expected = {0, 1, 0, 0, 1, 1, 0, 1};
  CHECK(oracle::census_bits(img, 1, 1, 3) == expected);
}

TEST_CASE("packed bits agree with the scalar oracle at every scale") {
  const GrayImage img = test::random_image(20, 16, 99);
  const std::vector<int> scales = {3, 5, 7};
  const CensusField field = census_transform(img, scales);
  REQUIRE(field.scales == scales);
  for (size_t s = 0; s < scales.size(); ++s) {
    const int k = scales[s];
    const int r = k / 2;
    for (int y = r; y < img.height - r; ++y)
      for (int x = r; x < img.width - r; ++x) {
        const std::vector<int> want = oracle::census_bits(img, x, y, k);
        for (int b = 0; b < k * k - 1; ++b)
          REQUIRE(production_bit(field, x, y, static_cast<int>(s), b) == want[b]);
      }
  }
}

TEST_CASE("k=11 descriptors span two words and match the oracle") {
  const GrayImage img = test::random_image(13, 13, 7);
  const CensusField field = census_transform(img, {11});
  REQUIRE(CensusField::words_per_pixel(11) == 2);
  const std::vector<int> want = oracle::census_bits(img, 6, 6, 11);
  for (int b = 0; b < 120; ++b) REQUIRE(production_bit(field, 6, 6, 0, b) == want[b]);
}

TEST_CASE("descriptors are invariant under monotone intensity remaps") {
  const GrayImage img = test::random_image(24, 18, 3);
  const std::vector<int> scales = {3, 5};
  const CensusField base = census_transform(img, scales);
  for (double gamma : {0.5, 1.7, 3.0}) {
    const CensusField warped = census_transform(remapped(img, gamma, 0.05), scales);
    for (size_t s = 0; s < scales.size(); ++s) REQUIRE(warped.bits[s] == base.bits[s]);
  }
}

TEST_CASE("ties produce hard bit 1 and soft bit one-half") {
  const GrayImage flat(5, 5, 0.375);
  const CensusField hard = census_transform(flat, {3});
  CHECK(hard.descriptor(2, 2, 0)[0] == 0xff);  // all eight comparisons tie

  const SoftCensusField soft = soft_census_transform(flat, {3}, 1e5);
  for (double b : soft.descriptor(2, 2, 0)) CHECK(b == 0.5);
}

TEST_CASE("soft census matches the oracle and hardens as C grows") {
  const GrayImage img = test::random_image(14, 12, 21);
  for (double C : {10.0, 1e5}) {
    const SoftCensusField soft = soft_census_transform(img, {3, 5}, C);
    CHECK(soft.steepness == C);
    for (size_t s = 0; s < 2; ++s) {
      const int k = soft.scales[s];
      const int r = k / 2;
      for (int y = r; y < img.height - r; ++y)
        for (int x = r; x < img.width - r; ++x) {
          const std::vector<double> want = oracle::soft_census_bits(img, x, y, k, C);
          const auto got = soft.descriptor(x, y, static_cast<int>(s));
          for (size_t b = 0; b < want.size(); ++b)
            REQUIRE(got[b] == doctest::Approx(want[b]).epsilon(1e-12));
        }
    }
  }

  // At C = 1e8 every non-tied soft bit rounds to its hard counterpart
  // (quantized intensities keep |differences| >= 1/65535 away from zero).
  GrayImage q = img;
  for (double& v : q.data) v = std::round(v * 65535.0) / 65535.0;
  const CensusField hard = census_transform(q, {3});
  const SoftCensusField sharp = soft_census_transform(q, {3}, 1e8);
  for (int y = 1; y < q.height - 1; ++y)
    for (int x = 1; x < q.width - 1; ++x)
      for (int b = 0; b < 8; ++b) {
        const double soft_bit = sharp.descriptor(x, y, 0)[b];
        if (soft_bit == 0.5) continue;  // exact tie keeps 1 in the hard transform
        REQUIRE(std::lround(soft_bit) == production_bit(hard, x, y, 0, b));
      }
}

TEST_CASE("hamming and normalized cost") {
  const uint64_t a[] = {0xffull};
  const uint64_t b[] = {0x00ull};
  CHECK(hamming({a, 1}, {b, 1}) == 8);
  CHECK(normalized_cost({a, 1}, {b, 1}, 3) == 8.0 / 9.0);  // divisor is k*k
  CHECK(normalized_cost({a, 1}, {a, 1}, 3) == 0.0);

  const uint64_t c[] = {~0ull, 0xffffffffffffffull};  // 120 bits set (k = 11)
  const uint64_t d[] = {0ull, 0ull};
  CHECK(hamming({c, 2}, {d, 2}) == 120);
  CHECK(normalized_cost({c, 2}, {d, 2}, 11) == 120.0 / 121.0);
}

TEST_CASE("soft hamming coincides with hamming on binary vectors") {
  SplitMix64 rng(5);
  std::vector<double> a(24), b(24);
  std::vector<uint64_t> pa(1, 0), pb(1, 0);
  for (int i = 0; i < 24; ++i) {
    a[i] = static_cast<double>(rng.next() & 1);
    b[i] = static_cast<double>(rng.next() & 1);
    if (a[i] != 0.0) pa[0] |= uint64_t{1} << i;
    if (b[i] != 0.0) pb[0] |= uint64_t{1} << i;
  }
  CHECK(soft_hamming({a.data(), a.size()}, {b.data(), b.size()}) ==
        static_cast<double>(hamming({pa.data(), 1}, {pb.data(), 1})));
}

TEST_CASE("scale validation") {
  const GrayImage img(8, 8, 0.5);
  CHECK_THROWS_AS(census_transform(img, {}), std::invalid_argument);
  CHECK_THROWS_AS(census_transform(img, {4}), std::invalid_argument);
  CHECK_THROWS_AS(census_transform(img, {1}), std::invalid_argument);
  CHECK_THROWS_AS(census_transform(img, {3, 6}), std::invalid_argument);
  CHECK_THROWS_AS(soft_census_transform(img, {3}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(soft_census_transform(img, {3}, -1.0), std::invalid_argument);
}

TEST_CASE("logistic is stable and symmetric") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == 0.0);
  CHECK(std::isfinite(logistic(-1e308)));
  for (double z : {0.1, 2.0, 37.5}) CHECK(logistic(z) + logistic(-z) == doctest::Approx(1.0));
}

TEST_CASE("hex dump prints one pixel per line, high word first") {
  const GrayImage img = test::random_image(4, 3, 11);
  const CensusField field = census_transform(img, {3});
  std::ostringstream os;
  dump_census_hex(field, 0, os);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    REQUIRE(line.size() == 16);  // one word, zero padded
    ++lines;
  }
  CHECK(lines == 12);
  // Spot-check the center pixel against its descriptor word.
  std::ostringstream want;
  want << std::hex << std::setw(16) << std::setfill('0') << field.descriptor(1, 1, 0)[0];
  std::istringstream again(os.str());
  for (int i = 0; i <= 1 * 4 + 1; ++i) std::getline(again, line);
  CHECK(line == want.str());
}
