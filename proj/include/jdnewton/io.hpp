#pragma once

// Matrix CSV and PGM image files.
//
// CSV: one matrix row per line, comma separated, '.' decimal point regardless
// of locale. Lines starting with '#' are comments; an optional "# n=<n>"
// header is checked against the data when present.

#include "jdnewton/matvec.hpp"

#include <string>

namespace jdn {

Matrix read_matrix_csv(const std::string& path);
Matrix parse_matrix_csv(const std::string& text);
void write_matrix_csv(const std::string& path, const Matrix& M);
std::string format_matrix_csv(const Matrix& M);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double x);

struct GrayImage {
  /// height x width, values mapped to [0, 1] by dividing by maxval.
  Matrix pixels;
  int maxval = 255;
};

/// Reads P2 (ASCII) and P5 (binary, 16-bit big-endian when maxval > 255).
GrayImage read_pgm(const std::string& path);
/// Values are clamped to [0, 1] and scaled by maxval (<= 65535).
void write_pgm(const std::string& path, const Matrix& pixels, int maxval = 255,
               bool binary = true);

}  // namespace jdn
