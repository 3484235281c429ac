#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace gridcast {

/// Dense row-major tensor of doubles.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const {
    assert(axis < shape_.size());
    return shape_[axis];
  }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  double& operator[](std::size_t i) {
    assert(i < data_.size());
    return data_[i];
  }
  double operator[](std::size_t i) const {
    assert(i < data_.size());
    return data_[i];
  }

  double& at(std::size_t i, std::size_t j) { return data_[offset(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) { return data_[offset(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return data_[offset(i, j, k)]; }

  /// Contiguous view of the trailing dimensions at leading index `i`.
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  /// Same data viewed with a different shape of equal element count.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  void fill(double value);
  bool all_finite() const noexcept;

  bool operator==(const Tensor& other) const = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    assert(shape_.size() == 2 && i < shape_[0] && j < shape_[1]);
    return i * shape_[1] + j;
  }
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    assert(shape_.size() == 3 && i < shape_[0] && j < shape_[1] && k < shape_[2]);
    return (i * shape_[1] + j) * shape_[2] + k;
  }

  Shape shape_;
  std::vector<double> data_;
};

std::size_t element_count(const Tensor::Shape& shape);
std::string shape_string(const Tensor::Shape& shape);

}  // namespace gridcast
