#include "msplat/array.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msplat {

int64_t Array::shape_product(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::runtime_error("Array: negative extent in shape");
    n *= d;
  }
  return n;
}

Array::Array(std::vector<int> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_product(shape_)), 0.0) {}

Array::Array(std::vector<int> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != static_cast<int64_t>(data_.size()))
    throw std::runtime_error("Array: shape " + shape_str() + " does not match data length " +
                             std::to_string(data_.size()));
}

Array Array::scalar(double v) { return Array({1}, {v}); }

Array Array::full(std::vector<int> shape, double v) {
  Array a(std::move(shape));
  a.fill(v);
  return a;
}

double& Array::at(std::initializer_list<int> idx) {
  const Array* self = this;
  return const_cast<double&>(self->at(idx));
}

double Array::at(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != ndim()) throw std::runtime_error("Array::at: index rank mismatch");
  int64_t off = 0;
  int k = 0;
  for (int i : idx) {
    if (i < 0 || i >= shape_[static_cast<size_t>(k)]) throw std::runtime_error("Array::at: index out of range");
    off = off * shape_[static_cast<size_t>(k)] + i;
    ++k;
  }
  return data_[static_cast<size_t>(off)];
}

bool Array::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Array::fill(double v) {
  for (auto& x : data_) x = v;
}

Array Array::reshaped(std::vector<int> shape) const {
  if (shape_product(shape) != size())
    throw std::runtime_error("Array::reshaped: cannot reshape " + shape_str() + " to new element count");
  return Array(std::move(shape), data_);
}

std::string Array::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ',';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

void check_same_shape(const Array& a, const Array& b, const char* where) {
  if (!a.same_shape(b))
    throw std::runtime_error(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace msplat
