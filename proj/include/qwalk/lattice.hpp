#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qwalk {

/// Cycle graph Z_n, n >= 2.
class CycleSpec {
 public:
  explicit CycleSpec(int n);

  int size() const { return n_; }
  bool is_odd() const { return odd_; }
  /// Number of distinct eigenvalues cos(2 pi j / n): floor(n/2) + 1.
  int class_count() const { return n_ / 2 + 1; }

 private:
  int n_;
  bool odd_;
};

/// Periodic lattice Z_{n1} x ... x Z_{nd}. Vertices are stored row-major,
/// the last coordinate varying fastest.
class LatticeSpec {
 public:
  static constexpr std::size_t kMaxVertices = std::size_t{1} << 31;

  explicit LatticeSpec(std::vector<int> dims);

  std::span<const int> dims() const { return dims_; }
  int dim(std::size_t k) const { return dims_[k]; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t vertex_count() const { return vertices_; }
  int max_dim() const;
  bool all_odd() const;
  /// d = 2, n1 > n2, both odd and coprime.
  bool theorem3_eligible() const { return theorem3_eligible_; }

  CycleSpec cycle(std::size_t k) const { return CycleSpec(dims_[k]); }

  std::size_t index(std::span<const int> coords) const;
  std::vector<int> coords(std::size_t index) const;
  /// Index of (q - p) mod dims, coordinate-wise.
  std::size_t difference(std::size_t q, std::size_t p) const;
  /// Index of (a + b) mod dims, coordinate-wise.
  std::size_t sum(std::size_t a, std::size_t b) const;
  /// Index of -a mod dims.
  std::size_t negate(std::size_t a) const;

  std::string to_string() const;

  bool operator==(const LatticeSpec& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t vertices_ = 1;
  bool theorem3_eligible_ = false;
};

/// Parses "19,5" style lists.
std::vector<int> parse_dims(const std::string& text);

bool pairwise_coprime(std::span<const int> values);

}  // namespace qwalk
