#pragma once

// Text matrix format:
//
//   <rows> <cols> real|complex
//   <rows lines of <cols> whitespace-separated entries>
//
// Complex entries: <float>, <float>+<float>i, <float>-<float>i, <float>i.
// Blank lines and lines starting with '#' are ignored.

#include <stdexcept>
#include <string>
#include <string_view>

#include "specvec/matrix_core.hpp"

namespace specvec {

enum class MatrixField { Real, Complex };

/// Malformed matrix text; line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

DenseMatrixd parse_matrix(std::string_view text);

/// Field tag that format_matrix will emit: real iff every imaginary part is +0.
MatrixField natural_field(const DenseMatrixd& a);

/// Entries written with 17 significant digits, so parse_matrix(format_matrix(a)) == a bit-exactly.
std::string format_matrix(const DenseMatrixd& a);

/// One entry in the literal grammar; throws std::invalid_argument on failure.
std::complex<double> parse_complex_literal(std::string_view token, MatrixField field = MatrixField::Complex);

std::string format_real(double x);

DenseMatrixd read_matrix_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace specvec
