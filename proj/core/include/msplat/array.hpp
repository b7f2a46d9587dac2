#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msplat {

/// Dense row-major array of doubles with a runtime shape.
/// The shape product always equals the number of stored elements.
class Array {
 public:
  Array() = default;
  explicit Array(std::vector<int> shape);
  Array(std::vector<int> shape, std::vector<double> data);

  static Array scalar(double v);
  static Array full(std::vector<int> shape, double v);
  static Array zeros_like(const Array& a) { return Array(a.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  /// Multi-index accessor, O(ndim). Intended for tests and setup code,
  /// not inner loops.
  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;

  bool same_shape(const Array& o) const { return shape_ == o.shape_; }
  bool is_scalar() const { return size() == 1; }
  bool all_finite() const;

  void fill(double v);
  Array reshaped(std::vector<int> shape) const;

  std::string shape_str() const;
  static int64_t shape_product(const std::vector<int>& shape);

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

/// Throws std::runtime_error naming `where` and both shapes.
void check_same_shape(const Array& a, const Array& b, const char* where);

}  // namespace msplat
