// Copyright 2026 The fran_aoi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRAN_AOI_TABLE_H_
#define FRAN_AOI_TABLE_H_

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fran_aoi {

// Dense row-major 2-D array with value semantics.
template <typename T>
class Table {
 public:
  Table() = default;
  Table(int rows, int cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<T> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

}  // namespace fran_aoi

#endif  // FRAN_AOI_TABLE_H_
