#include "mdgan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdgan {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw std::invalid_argument("Matrix: data length does not match rows*cols");
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix& Tensor::ensure_grad() {
  if (!grad.same_shape(value)) grad = Matrix(value.rows(), value.cols());
  return grad;
}

void Tensor::zero_grad() {
  if (has_grad()) grad.fill(0.0);
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace mdgan
