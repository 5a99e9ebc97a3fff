#include "dfrc/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dfrc {

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_matrix(std::ostream& os, const CMatrix& A) {
  os << A.rows() << ' ' << A.cols() << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) os << ' ';
      put(os, A(i, j).real());
      os << ' ';
      put(os, A(i, j).imag());
    }
    os << '\n';
  }
}

void write_matrix(const std::string& path, const CMatrix& A) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix(f, A);
  if (!f) throw std::runtime_error("write failed: " + path);
}

CMatrix read_matrix(std::istream& is) {
  long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("matrix file: bad header");
  CMatrix A(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im)) throw std::runtime_error("matrix file: truncated data");
      A(i, j) = cdouble(re, im);
    }
  std::string extra;
  if (is >> extra) throw std::runtime_error("matrix file: trailing data");
  return A;
}

CMatrix read_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_matrix(f);
}

}  // namespace dfrc
