#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "memseconv/errors.hpp"
#include "memseconv/grid.hpp"

namespace memseconv {

enum class PgmFormat { P2, P5 };

struct PgmParseError : std::runtime_error {
  std::size_t offset;
  PgmParseError(std::size_t off, const std::string& msg)
      : std::runtime_error("PGM parse error at byte " + std::to_string(off) + ": " + msg),
        offset(off) {}
};

struct PgmUnsupportedError : std::runtime_error {
  explicit PgmUnsupportedError(const std::string& msg)
      : std::runtime_error("unsupported PGM: " + msg) {}
};

namespace detail {

// Header tokenizer: skips whitespace and '#' comments, keeps a byte cursor so
// errors can name the offending offset.
struct PgmCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  std::uint8_t peek() const { return bytes[pos]; }

  void skip_space_and_comments() {
    while (!eof()) {
      const std::uint8_t c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_space_and_comments();
    if (eof()) throw PgmParseError(pos, std::string("expected ") + what + ", found end of data");
    if (peek() < '0' || peek() > '9')
      throw PgmParseError(pos, std::string("expected ") + what);
    long value = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + (peek() - '0');
      if (value > 1'000'000'000L) throw PgmParseError(pos, std::string(what) + " out of range");
      ++pos;
    }
    return value;
  }
};

}  // namespace detail

/// Parse a P2 (ASCII) or P5 (binary) PGM with maxval 255.
inline Image8 load_pgm(std::span<const std::uint8_t> bytes) {
  detail::PgmCursor cur{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw PgmParseError(0, "missing P2/P5 magic");
  const bool binary = bytes[1] == '5';
  cur.pos = 2;

  const long width = cur.read_int("width");
  const long height = cur.read_int("height");
  const long maxval = cur.read_int("maxval");
  if (width < 1 || height < 1)
    throw PgmParseError(cur.pos, "dimensions must be positive");
  if (maxval != 255)
    throw PgmUnsupportedError("maxval must be 255, got " + std::to_string(maxval));

  Image8 image(static_cast<int>(width), static_cast<int>(height));
  if (binary) {
    if (cur.eof()) throw PgmParseError(cur.pos, "missing whitespace after maxval");
    ++cur.pos;  // exactly one whitespace byte separates header and payload
    if (bytes.size() - cur.pos < image.size())
      throw PgmParseError(bytes.size(),
                          "truncated payload: expected " + std::to_string(image.size()) +
                              " bytes, got " + std::to_string(bytes.size() - cur.pos));
    for (std::size_t i = 0; i < image.size(); ++i) image.data[i] = bytes[cur.pos + i];
  } else {
    for (std::size_t i = 0; i < image.size(); ++i) {
      cur.skip_space_and_comments();
      if (cur.eof())
        throw PgmParseError(cur.pos, "truncated payload: expected " +
                                         std::to_string(image.size()) + " samples, got " +
                                         std::to_string(i));
      const std::size_t at = cur.pos;
      const long v = cur.read_int("sample");
      if (v > 255) throw PgmParseError(at, "sample exceeds maxval 255");
      image.data[i] = static_cast<std::uint8_t>(v);
    }
  }
  return image;
}

inline std::vector<std::uint8_t> save_pgm(const Image8& image, PgmFormat format = PgmFormat::P5) {
  std::string header = (format == PgmFormat::P5 ? "P5\n" : "P2\n");
  header += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  if (format == PgmFormat::P5) {
    out.insert(out.end(), image.data.begin(), image.data.end());
  } else {
    std::string body;
    int on_line = 0;
    for (std::size_t i = 0; i < image.size(); ++i) {
      body += std::to_string(static_cast<int>(image.data[i]));
      // keep lines comfortably under the 70-character convention
      if (++on_line == 17 || i + 1 == image.size()) {
        body += '\n';
        on_line = 0;
      } else {
        body += ' ';
      }
    }
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

inline Image8 load_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

inline void save_pgm_file(const Image8& image, const std::string& path,
                          PgmFormat format = PgmFormat::P5) {
  const auto bytes = save_pgm(image, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace memseconv
