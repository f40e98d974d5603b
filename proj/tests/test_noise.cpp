#include <doctest.h>

#include "memseconv/noise.hpp"
#include "memseconv/texture.hpp"

using namespace memseconv;

TEST_CASE("zero density leaves the image untouched") {
  const Image8 clean = make_texture(20, 20, 3);
  const NoisyImage out = inject_sap(clean, NoiseSpec{0.0, 0.5, 42});
  CHECK(out.noisy == clean);
  for (auto m : out.corrupted.data) CHECK(m == 0);
}

TEST_CASE("density one with zero salt fraction turns every pixel to pepper") {
  const Image8 clean = make_texture(16, 16, 4);
  const NoisyImage out = inject_sap(clean, NoiseSpec{1.0, 0.0, 42});
  for (auto v : out.noisy.data) CHECK(v == 0);
  for (auto m : out.corrupted.data) CHECK(m == 1);
}

TEST_CASE("density one with salt fraction one turns every pixel to salt") {
  const Image8 clean = make_texture(16, 16, 4);
  const NoisyImage out = inject_sap(clean, NoiseSpec{1.0, 1.0, 42});
  for (auto v : out.noisy.data) CHECK(v == 255);
}

TEST_CASE("corrupted count sits within 3 sigma of the binomial mean") {
  const Image8 clean = make_texture(100, 100, 5);
  long long corrupted = 0;
  const NoisyImage out = inject_sap(clean, NoiseSpec{0.5, 0.5, 7});
  for (auto m : out.corrupted.data) corrupted += m;
  // n = 10000, p = 0.5: mean 5000, sigma = sqrt(10000 * 0.25) = 50
  CHECK(corrupted > 5000 - 150);
  CHECK(corrupted < 5000 + 150);
}

TEST_CASE("same seed reproduces the same corruption bit for bit") {
  const Image8 clean = make_texture(40, 40, 6);
  const NoiseSpec spec{0.3, 0.5, 12345};
  const NoisyImage a = inject_sap(clean, spec);
  const NoisyImage b = inject_sap(clean, spec);
  CHECK(a.noisy == b.noisy);
  CHECK(a.corrupted == b.corrupted);
}

TEST_CASE("corrupted pixels carry only the extreme values") {
  const Image8 clean = make_texture(30, 30, 9);
  const NoisyImage out = inject_sap(clean, NoiseSpec{0.4, 0.5, 11});
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (out.corrupted.data[i])
      CHECK((out.noisy.data[i] == 0 || out.noisy.data[i] == 255));
    else
      CHECK(out.noisy.data[i] == clean.data[i]);
  }
}

TEST_CASE("out-of-range specs are rejected") {
  const Image8 clean = make_texture(8, 8, 1);
  CHECK_THROWS_AS(inject_sap(clean, NoiseSpec{1.5, 0.5, 0}), ConfigError);
  CHECK_THROWS_AS(inject_sap(clean, NoiseSpec{0.5, -0.1, 0}), ConfigError);
}
