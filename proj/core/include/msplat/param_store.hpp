#pragma once

#include <map>
#include <string>
#include <vector>

#include "msplat/array.hpp"

namespace msplat {

/// Named learnable arrays with accumulated gradients and Adam state.
/// Gradient shape always equals the parameter shape.
class ParamStore {
 public:
  struct Entry {
    Array value;
    Array grad;
    Array adam_m;
    Array adam_v;
  };

  /// Registers a parameter. Throws if the name already exists.
  Array& create(const std::string& name, Array init);

  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;
  Array& value(const std::string& name) { return entry(name).value; }
  Array& grad(const std::string& name) { return entry(name).grad; }

  /// Parameter names in registration order.
  const std::vector<std::string>& names() const { return order_; }

  void zero_grads();

  /// Returns the name of the first parameter whose value contains a
  /// non-finite entry, or an empty string if all are finite.
  std::string first_non_finite() const;

  /// Flat little-endian archive: per entry, name, shape and values
  /// (Adam state included so training can resume exactly).
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

}  // namespace msplat
