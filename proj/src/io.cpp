#include "jdnewton/io.hpp"

#include "jdnewton/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace jdn {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  long declared_n = -1;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("n=");
      if (pos != std::string_view::npos) {
        declared_n = static_cast<long>(parse_double(line.substr(pos + 2), line_no));
      }
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_double(line.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no matrix data");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (declared_n >= 0 && declared_n != M.rows()) {
    throw Error(ErrorCode::ParseError, "header declares n=" + std::to_string(declared_n) +
                                           " but data has " + std::to_string(M.rows()) + " rows");
  }
  return M;
}

Matrix read_matrix_csv(const std::string& path) {
  try {
    return parse_matrix_csv(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path + ": " + e.what());
    throw;
  }
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_matrix_csv(const Matrix& M) {
  std::string out;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out += ',';
      out += format_double(M(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << format_matrix_csv(M);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw Error(ErrorCode::ParseError, "PGM: unexpected end of file");
  return data.substr(start, pos - start);
}

long pgm_int(const std::string& data, std::size_t& pos) {
  const std::string tok = pgm_token(data, pos);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw Error(ErrorCode::ParseError, "PGM: bad integer '" + tok + "'");
  }
  return v;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  const std::string magic = pgm_token(data, pos);
  if (magic != "P2" && magic != "P5") throw Error(ErrorCode::ParseError, path + ": not a PGM file");
  const long width = pgm_int(data, pos);
  const long height = pgm_int(data, pos);
  const long maxval = pgm_int(data, pos);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::ParseError, path + ": bad PGM header");
  }
  GrayImage img{Matrix(height, width), static_cast<int>(maxval)};
  if (magic == "P2") {
    for (long i = 0; i < height; ++i)
      for (long j = 0; j < width; ++j) {
        const long v = pgm_int(data, pos);
        if (v > maxval) throw Error(ErrorCode::ParseError, path + ": pixel exceeds maxval");
        img.pixels(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    return img;
  }
  ++pos;  // single whitespace after maxval
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  if (data.size() < pos + static_cast<std::size_t>(width * height) * bytes) {
    throw Error(ErrorCode::ParseError, path + ": truncated PGM data");
  }
  for (long i = 0; i < height; ++i)
    for (long j = 0; j < width; ++j) {
      long v = static_cast<unsigned char>(data[pos]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data[pos + 1]);
      pos += bytes;
      if (v > maxval) throw Error(ErrorCode::ParseError, path + ": pixel exceeds maxval");
      img.pixels(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  return img;
}

void write_pgm(const std::string& path, const Matrix& pixels, int maxval, bool binary) {
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::InvalidArgument, "PGM maxval out of range");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << (binary ? "P5" : "P2") << '\n' << pixels.cols() << ' ' << pixels.rows() << '\n' << maxval << '\n';
  for (Index i = 0; i < pixels.rows(); ++i) {
    for (Index j = 0; j < pixels.cols(); ++j) {
      const double v = std::clamp(pixels(i, j), 0.0, 1.0);
      const long q = std::lround(v * maxval);
      if (!binary) {
        out << q << (j + 1 == pixels.cols() ? '\n' : ' ');
      } else if (maxval > 255) {
        out.put(static_cast<char>((q >> 8) & 0xff));
        out.put(static_cast<char>(q & 0xff));
      } else {
        out.put(static_cast<char>(q));
      }
    }
  }
}

}  // namespace jdn
