#pragma once

#include <cmath>
#include <random>

#include "msplat/array.hpp"

namespace msplat::nninit {

inline Array uniform(std::vector<int> shape, double lo, double hi, std::mt19937_64& rng) {
  Array a(std::move(shape));
  std::uniform_real_distribution<double> d(lo, hi);
  for (int64_t i = 0, e = a.size(); i < e; ++i) a[i] = d(rng);
  return a;
}

inline Array normal(std::vector<int> shape, double stddev, std::mt19937_64& rng) {
  Array a(std::move(shape));
  std::normal_distribution<double> d(0.0, stddev);
  for (int64_t i = 0, e = a.size(); i < e; ++i) a[i] = d(rng);
  return a;
}

/// Xavier/Glorot uniform for a [fan_in, fan_out] weight matrix.
inline Array xavier(int fan_in, int fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  return uniform({fan_in, fan_out}, -a, a, rng);
}

inline Array zeros(std::vector<int> shape) { return Array(std::move(shape)); }

}  // namespace msplat::nninit
