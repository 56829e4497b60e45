#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace heatseq {

/// Dense row-major matrix of doubles. Entry (r, c) lives at data()[r * cols() + c];
/// checkpoints rely on this layout.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v);
  Matrix transposed() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ElementOp { Tanh, Sigmoid, Exp, Add, Mul, Sub };

double sigmoid(double x);

Matrix matmul(const Matrix& a, const Matrix& b);

// Unary ops ignore `b`; binary ops require identical shapes.
Matrix elementwise(ElementOp op, const Matrix& a, const Matrix* b = nullptr);
Matrix elementwise(ElementOp op, const Matrix& a, const Matrix& b);

/// Numerically stable softmax (max-subtracted). Throws ArgumentError on empty input.
std::vector<double> softmax(std::span<const double> v);

}  // namespace heatseq
