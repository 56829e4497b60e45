#include "heatseq/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double sigmoid(double x) {
  // Branches keep exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a) + " times " + dims(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* b_row = b.row(k).data();
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix elementwise(ElementOp op, const Matrix& a, const Matrix* b) {
  const bool binary = op == ElementOp::Add || op == ElementOp::Mul || op == ElementOp::Sub;
  if (binary) {
    if (b == nullptr) throw ArgumentError("elementwise: binary op needs a second operand");
    if (a.rows() != b->rows() || a.cols() != b->cols()) {
      throw ShapeError("elementwise: " + dims(a) + " vs " + dims(*b));
    }
  }
  Matrix out(a.rows(), a.cols());
  auto in = a.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    switch (op) {
      case ElementOp::Tanh: dst[i] = std::tanh(in[i]); break;
      case ElementOp::Sigmoid: dst[i] = sigmoid(in[i]); break;
      case ElementOp::Exp: dst[i] = std::exp(in[i]); break;
      case ElementOp::Add: dst[i] = in[i] + b->values()[i]; break;
      case ElementOp::Mul: dst[i] = in[i] * b->values()[i]; break;
      case ElementOp::Sub: dst[i] = in[i] - b->values()[i]; break;
    }
  }
  return out;
}

Matrix elementwise(ElementOp op, const Matrix& a, const Matrix& b) { return elementwise(op, a, &b); }

std::vector<double> softmax(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("softmax of an empty vector");
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - top);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace heatseq
