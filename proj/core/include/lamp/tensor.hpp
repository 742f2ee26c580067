#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace lamp {

/// Dense row-major 2-D matrix of doubles.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor identity(std::size_t n);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  void fill(double v);
  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// "3x4"
std::string shape_string(const Tensor& t);

/// Throws ShapeError naming both shapes when `ok` is false.
void require_shape(bool ok, const char* op, const Tensor& a, const Tensor& b);

// Plain kernels (no differentiation). Used by the tape ops and by inference code.
Tensor matmul(const Tensor& a, const Tensor& b);     ///< a * b
Tensor matmul_bt(const Tensor& a, const Tensor& b);  ///< a * b^T
Tensor matmul_at(const Tensor& a, const Tensor& b);  ///< a^T * b
Tensor transpose(const Tensor& a);

/// In-place `dst += src`.
void add_into(Tensor& dst, const Tensor& src);
/// In-place `dst += scale * src`.
void axpy_into(Tensor& dst, double scale, const Tensor& src);

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace lamp
