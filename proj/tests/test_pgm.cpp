#include <doctest.h>

#include <string>

#include "memseconv/pgm.hpp"
#include "memseconv/rng.hpp"

using namespace memseconv;

namespace {
std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}
}  // namespace

TEST_CASE("minimal P2 file parses") {
  const auto b = bytes_of("P2 2 1 255\n0 255\n");
  const Image8 img = load_pgm(b);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.data == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("P2 with comments parses") {
  const auto b = bytes_of("P2\n# a comment\n2 2\n# another\n255\n1 2\n3 4\n");
  const Image8 img = load_pgm(b);
  CHECK(img.data == std::vector<std::uint8_t>{1, 2, 3, 4});
}

TEST_CASE("1x1 grid saves to a valid P5 stream with one payload byte") {
  Image8 img(1, 1);
  img.data[0] = 128;
  const auto bytes = save_pgm(img, PgmFormat::P5);
  const std::string header(bytes.begin(), bytes.end() - 1);
  CHECK(header == "P5\n1 1\n255\n");
  CHECK(bytes.back() == 0x80);
}

TEST_CASE("P5 equals the equivalent P2") {
  Image8 img(3, 2);
  img.data = {0, 10, 20, 30, 250, 255};
  CHECK(load_pgm(save_pgm(img, PgmFormat::P5)) == load_pgm(save_pgm(img, PgmFormat::P2)));
}

TEST_CASE("round-trip identity on random grids, both formats") {
  Pcg32 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 1 + static_cast<int>(rng.next_u32() % 24);
    const int h = 1 + static_cast<int>(rng.next_u32() % 24);
    Image8 img(w, h);
    for (auto& px : img.data) px = static_cast<std::uint8_t>(rng.next_u32() & 0xff);
    CHECK(load_pgm(save_pgm(img, PgmFormat::P5)) == img);
    CHECK(load_pgm(save_pgm(img, PgmFormat::P2)) == img);
  }
}

TEST_CASE("truncated P5 payload fails with the byte offset") {
  auto b = bytes_of("P5\n2 2\n255\n");
  b.push_back(1);
  b.push_back(2);
  b.push_back(3);  // header claims 4 pixels
  CHECK_THROWS_AS(load_pgm(b), PgmParseError);
  try {
    load_pgm(b);
  } catch (const PgmParseError& e) {
    CHECK(e.offset == b.size());
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("truncated P2 sample list fails") {
  const auto b = bytes_of("P2 2 2 255 7 7 7");
  CHECK_THROWS_AS(load_pgm(b), PgmParseError);
}

TEST_CASE("bad magic fails at offset zero") {
  const auto b = bytes_of("P6 1 1 255 x");
  try {
    load_pgm(b);
    FAIL("expected PgmParseError");
  } catch (const PgmParseError& e) {
    CHECK(e.offset == 0);
  }
}

TEST_CASE("maxval other than 255 is unsupported") {
  CHECK_THROWS_AS(load_pgm(bytes_of("P2 1 1 65535 0")), PgmUnsupportedError);
  CHECK_THROWS_AS(load_pgm(bytes_of("P2 1 1 15 0")), PgmUnsupportedError);
}

TEST_CASE("P2 sample above maxval is a parse error") {
  CHECK_THROWS_AS(load_pgm(bytes_of("P2 1 1 255 300")), PgmParseError);
}
