#include "msplat/param_store.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace msplat {

namespace {
constexpr char kMagic[8] = {'M', 'S', 'P', 'A', 'R', 'A', 'M', '1'};

void write_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& os, const std::vector<double>& v) {
  // Doubles stored little-endian; on the supported platforms this is the
  // native representation.
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& is, std::vector<double>& v) {
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}
}  // namespace

Array& ParamStore::create(const std::string& name, Array init) {
  if (entries_.count(name)) throw std::runtime_error("ParamStore: duplicate parameter " + name);
  Entry e;
  e.grad = Array(init.shape());
  e.adam_m = Array(init.shape());
  e.adam_v = Array(init.shape());
  e.value = std::move(init);
  auto [it, ok] = entries_.emplace(name, std::move(e));
  (void)ok;
  order_.push_back(name);
  return it->second.value;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::runtime_error("ParamStore: unknown parameter " + name);
  return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::runtime_error("ParamStore: unknown parameter " + name);
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, e] : entries_) e.grad.fill(0.0);
}

std::string ParamStore::first_non_finite() const {
  for (const auto& name : order_)
    if (!entries_.at(name).value.all_finite()) return name;
  return {};
}

void ParamStore::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("ParamStore: cannot write " + path);
  os.write(kMagic, 8);
  write_u64(os, order_.size());
  for (const auto& name : order_) {
    const Entry& e = entries_.at(name);
    write_u64(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(os, static_cast<uint64_t>(e.value.ndim()));
    for (int d : e.value.shape()) write_u64(os, static_cast<uint64_t>(d));
    write_doubles(os, e.value.vec());
    write_doubles(os, e.adam_m.vec());
    write_doubles(os, e.adam_v.vec());
  }
  if (!os) throw std::runtime_error("ParamStore: write failed for " + path);
}

void ParamStore::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("ParamStore: cannot read " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("ParamStore: bad archive header in " + path);
  uint64_t count = read_u64(is);
  for (uint64_t i = 0; i < count; ++i) {
    uint64_t len = read_u64(is);
    std::string name(len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(len));
    uint64_t nd = read_u64(is);
    std::vector<int> shape(nd);
    for (auto& d : shape) d = static_cast<int>(read_u64(is));
    Array value(shape), m(shape), v(shape);
    read_doubles(is, value.vec());
    read_doubles(is, m.vec());
    read_doubles(is, v.vec());
    if (!is) throw std::runtime_error("ParamStore: truncated archive " + path);
    if (entries_.count(name)) {
      Entry& e = entries_.at(name);
      if (!e.value.same_shape(value))
        throw std::runtime_error("ParamStore: shape mismatch for " + name + " while loading " + path);
      e.value = std::move(value);
      e.adam_m = std::move(m);
      e.adam_v = std::move(v);
    } else {
      Entry e;
      e.grad = Array(shape);
      e.value = std::move(value);
      e.adam_m = std::move(m);
      e.adam_v = std::move(v);
      entries_.emplace(name, std::move(e));
      order_.push_back(name);
    }
  }
}

}  // namespace msplat
