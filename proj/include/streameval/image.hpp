/*
 * Copyright 2026 The StreamEval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef STREAMEVAL_IMAGE_HPP_
#define STREAMEVAL_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace streameval {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  std::string ToString() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense row-major 2-D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(Shape shape, T fill = T{})
      : shape_(shape), data_(shape.size(), fill) {}
  Grid(Shape shape, std::vector<T> data)
      : shape_(shape), data_(std::move(data)) {}

  const Shape& shape() const { return shape_; }
  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) {
    return data_[r * shape_.cols + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * shape_.cols + c];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using ScoreMap = Grid<float>;
// Binary mask; any nonzero value is foreground.
using Mask = Grid<std::uint8_t>;

}  // namespace streameval

#endif  // STREAMEVAL_IMAGE_HPP_
