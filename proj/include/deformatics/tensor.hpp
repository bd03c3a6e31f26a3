#pragma once

#include <cassert>
#include <initializer_list>
#include <vector>

#include "deformatics/rational.hpp"

namespace deformatics {

/// Dense row-major tensor with explicit shape. Index order is the order of declaration.
template <class T>
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> shape) : shape_(std::move(shape)) {
    size_t total = 1;
    for (int s : shape_) total *= static_cast<size_t>(s);
    data_.assign(total, T());
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return data_.size(); }

  size_t offset(std::initializer_list<int> idx) const {
    assert(idx.size() == shape_.size());
    size_t off = 0;
    int d = 0;
    for (int i : idx) {
      assert(i >= 0 && i < shape_[d]);
      off = off * shape_[d] + i;
      ++d;
    }
    return off;
  }
  size_t offset(const std::vector<int>& idx) const {
    size_t off = 0;
    for (size_t d = 0; d < idx.size(); ++d) off = off * shape_[d] + idx[d];
    return off;
  }
  std::vector<int> unflatten(size_t off) const {
    std::vector<int> idx(shape_.size());
    for (int d = rank() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(off % shape_[d]);
      off /= shape_[d];
    }
    return idx;
  }

  T& operator()(std::initializer_list<int> idx) { return data_[offset(idx)]; }
  const T& operator()(std::initializer_list<int> idx) const { return data_[offset(idx)]; }
  T& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
  const T& at(const std::vector<int>& idx) const { return data_[offset(idx)]; }
  T& flat(size_t i) { return data_[i]; }
  const T& flat(size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const DenseTensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using RTensor = DenseTensor<Rational>;

inline bool all_zero(const RTensor& t) {
  for (const auto& x : t.data())
    if (!is_zero(x)) return false;
  return true;
}

/// Small dense exact matrix.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<size_t>(rows) * cols) {}
  static RMatrix identity(int n);

  int rows() const { return r_; }
  int cols() const { return c_; }
  Rational& operator()(int i, int j) { return d_[static_cast<size_t>(i) * c_ + j]; }
  const Rational& operator()(int i, int j) const { return d_[static_cast<size_t>(i) * c_ + j]; }

  RMatrix operator*(const RMatrix& o) const;
  RMatrix operator+(const RMatrix& o) const;
  RMatrix operator-(const RMatrix& o) const;
  RMatrix transpose() const;
  bool operator==(const RMatrix& o) const { return r_ == o.r_ && c_ == o.c_ && d_ == o.d_; }

  Rational determinant() const;
  /// Throws PreconditionError when singular.
  RMatrix inverse() const;
  bool is_symmetric() const;
  bool is_antisymmetric() const;
  bool is_zero() const;
  /// Basis of the right null space, each vector of length cols().
  std::vector<std::vector<Rational>> null_space() const;
  int rank() const;

 private:
  int r_ = 0, c_ = 0;
  std::vector<Rational> d_;
};

}  // namespace deformatics
