#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace genrank {

/// Dense row-major matrix, just enough surface for block assembly and rank.
template <class T> class Matrix {
public:
  Matrix() = default;
  Matrix(std::int64_t rows, std::int64_t cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows * cols), T{}) {}

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }

  T &operator()(std::int64_t i, std::int64_t j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }
  const T &operator()(std::int64_t i, std::int64_t j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  std::span<T> row(std::int64_t i) {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(std::int64_t i) const {
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }

  const std::vector<T> &data() const { return data_; }

private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<T> data_;
};

} // namespace genrank
