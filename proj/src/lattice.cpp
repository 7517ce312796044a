#include "qwalk/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qwalk/error.hpp"

namespace qwalk {

CycleSpec::CycleSpec(int n) : n_(n), odd_(n % 2 != 0) {
  if (n < 2) {
    throw InvalidInput("cycle length must be >= 2, got " + std::to_string(n));
  }
}

LatticeSpec::LatticeSpec(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw InvalidInput("lattice needs at least one dimension");
  }
  for (int n : dims_) {
    if (n < 2) {
      throw InvalidInput("lattice dimension must be >= 2, got " + std::to_string(n));
    }
    if (vertices_ > kMaxVertices / static_cast<std::size_t>(n)) {
      throw SizeError("lattice vertex count overflows");
    }
    vertices_ *= static_cast<std::size_t>(n);
  }
  strides_.assign(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 1;) {
    strides_[k - 1] = strides_[k] * static_cast<std::size_t>(dims_[k]);
  }
  theorem3_eligible_ = dims_.size() == 2 && dims_[0] > dims_[1] && dims_[0] % 2 == 1 &&
                       dims_[1] % 2 == 1 && std::gcd(dims_[0], dims_[1]) == 1;
}

int LatticeSpec::max_dim() const { return *std::max_element(dims_.begin(), dims_.end()); }

bool LatticeSpec::all_odd() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n % 2 == 1; });
}

std::size_t LatticeSpec::index(std::span<const int> coords) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    int c = coords[k] % dims_[k];
    if (c < 0) c += dims_[k];
    idx += static_cast<std::size_t>(c) * strides_[k];
  }
  return idx;
}

std::vector<int> LatticeSpec::coords(std::size_t index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    out[k] = static_cast<int>(index / strides_[k]);
    index %= strides_[k];
  }
  return out;
}

std::size_t LatticeSpec::difference(std::size_t q, std::size_t p) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto n = static_cast<std::size_t>(dims_[k]);
    const std::size_t qk = (q / strides_[k]) % n;
    const std::size_t pk = (p / strides_[k]) % n;
    idx += ((qk + n - pk) % n) * strides_[k];
  }
  return idx;
}

std::size_t LatticeSpec::sum(std::size_t a, std::size_t b) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto n = static_cast<std::size_t>(dims_[k]);
    const std::size_t ak = (a / strides_[k]) % n;
    const std::size_t bk = (b / strides_[k]) % n;
    idx += ((ak + bk) % n) * strides_[k];
  }
  return idx;
}

std::size_t LatticeSpec::negate(std::size_t a) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto n = static_cast<std::size_t>(dims_[k]);
    const std::size_t ak = (a / strides_[k]) % n;
    idx += ((n - ak) % n) * strides_[k];
  }
  return idx;
}

std::string LatticeSpec::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) os << ',';
    os << dims_[k];
  }
  return os.str();
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InvalidInput("empty entry in list '" + text + "'");
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("not an integer: '" + item + "'");
    }
    if (used != item.size()) throw InvalidInput("not an integer: '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw InvalidInput("empty list");
  return out;
}

bool pairwise_coprime(std::span<const int> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (std::gcd(values[i], values[j]) != 1) return false;
    }
  }
  return true;
}

}  // namespace qwalk
