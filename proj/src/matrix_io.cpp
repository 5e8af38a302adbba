#include "specvec/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace specvec {

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> split_whitespace(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

/// Parse a float prefix of s (optional leading '+' or '-'); returns chars consumed or 0.
std::size_t parse_float_prefix(std::string_view s, double& value) {
  std::size_t off = 0;
  if (!s.empty() && s[0] == '+') {
    off = 1;
    if (s.size() > 1 && (s[1] == '-' || s[1] == '+')) return 0;
  }
  const char* first = s.data() + off;
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, value, std::chars_format::general);
  if (res.ec != std::errc()) return 0;
  return static_cast<std::size_t>(res.ptr - s.data());
}

bool is_finite(double x) { return std::isfinite(x); }

}  // namespace

std::complex<double> parse_complex_literal(std::string_view token, MatrixField field) {
  auto fail = [&](const char* why) {
    throw std::invalid_argument(std::string(why) + ": '" + std::string(token) + "'");
  };
  double re = 0.0;
  const std::size_t n = parse_float_prefix(token, re);
  if (n == 0) fail("unparseable number");
  if (!is_finite(re)) fail("non-finite value");
  std::string_view rest = token.substr(n);
  if (rest.empty()) return {re, 0.0};
  if (field == MatrixField::Real) fail("complex literal in a real matrix");
  if (rest == "i") return {0.0, re};
  if (rest.back() != 'i' || (rest[0] != '+' && rest[0] != '-')) fail("malformed complex literal");
  const bool negative = rest[0] == '-';
  std::string_view imag_text = rest.substr(1, rest.size() - 2);
  if (imag_text.empty() || imag_text[0] == '+' || imag_text[0] == '-') fail("malformed imaginary part");
  double im = 0.0;
  if (parse_float_prefix(imag_text, im) != imag_text.size()) fail("malformed imaginary part");
  if (!is_finite(im)) fail("non-finite value");
  return {re, negative ? -im : im};
}

DenseMatrixd parse_matrix(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> lines;
  {
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      ++number;
      std::string_view line = text.substr(pos, end - pos);
      const auto toks = split_whitespace(line);
      if (!toks.empty() && toks[0].text[0] != '#') lines.emplace_back(number, line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }
  if (lines.empty()) throw ParseError("missing header", 1, 1);

  const auto [header_line, header_text] = lines[0];
  const auto header = split_whitespace(header_text);
  if (header.size() != 3) throw ParseError("header must be '<rows> <cols> real|complex'", header_line, 1);
  auto parse_count = [&](const Token& t, const char* what) {
    long long v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || v < 1)
      throw ParseError(std::string("invalid ") + what + " count '" + std::string(t.text) + "'", header_line,
                       t.column);
    return static_cast<Index>(v);
  };
  const Index rows = parse_count(header[0], "row");
  const Index cols = parse_count(header[1], "column");
  MatrixField field;
  if (header[2].text == "real")
    field = MatrixField::Real;
  else if (header[2].text == "complex")
    field = MatrixField::Complex;
  else
    throw ParseError("field tag must be 'real' or 'complex', got '" + std::string(header[2].text) + "'",
                     header_line, header[2].column);

  const Index body = static_cast<Index>(lines.size()) - 1;
  if (body != rows) {
    const int at = body > rows ? lines[static_cast<std::size_t>(rows + 1)].first : lines.back().first + 1;
    throw ParseError("expected " + std::to_string(rows) + " data rows, found " + std::to_string(body), at, 1);
  }

  ComplexMatrix<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto [line_no, line] = lines[static_cast<std::size_t>(r + 1)];
    const auto toks = split_whitespace(line);
    if (static_cast<Index>(toks.size()) != cols)
      throw ParseError("expected " + std::to_string(cols) + " entries, found " + std::to_string(toks.size()),
                       line_no, toks.size() > static_cast<std::size_t>(cols)
                                    ? toks[static_cast<std::size_t>(cols)].column
                                    : static_cast<int>(line.size()) + 1);
    for (Index c = 0; c < cols; ++c) {
      const auto& t = toks[static_cast<std::size_t>(c)];
      try {
        m(r, c) = parse_complex_literal(t.text, field);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, t.column);
      }
    }
  }
  return DenseMatrixd(std::move(m));
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

MatrixField natural_field(const DenseMatrixd& a) {
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r) {
      const double im = a(r, c).imag();
      if (im != 0.0 || std::signbit(im)) return MatrixField::Complex;
    }
  return MatrixField::Real;
}

std::string format_matrix(const DenseMatrixd& a) {
  const MatrixField field = natural_field(a);
  std::ostringstream os;
  os << a.rows() << ' ' << a.cols() << ' ' << (field == MatrixField::Real ? "real" : "complex") << '\n';
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      if (c > 0) os << ' ';
      const auto z = a(r, c);
      os << format_real(z.real());
      if (field == MatrixField::Complex) {
        os << (std::signbit(z.imag()) ? '-' : '+') << format_real(std::abs(z.imag())) << 'i';
      }
    }
    os << '\n';
  }
  return os.str();
}

DenseMatrixd read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str());
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace specvec
