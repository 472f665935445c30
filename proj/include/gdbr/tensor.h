// Copyright 2026 The GDBR Authors
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

#ifndef GDBR_TENSOR_H_
#define GDBR_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gdbr {

using Shape = std::vector<std::size_t>;

std::size_t ShapeSize(const Shape& shape);
std::string ShapeString(const Shape& shape);

// Dense row-major array of doubles. Value type: copies are deep.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  // Throws DimensionError if the element count does not match the shape.
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  // Multi-index access; the index count must equal rank().
  double at(std::initializer_list<std::size_t> index) const {
    return data_[Offset(index)];
  }
  double& at(std::initializer_list<std::size_t> index) {
    return data_[Offset(index)];
  }

  Tensor Reshaped(Shape shape) const;
  // Same data viewed as a rank-1 tensor.
  Tensor Flattened() const { return Reshaped({size()}); }

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double scale);

  bool operator==(const Tensor& other) const = default;

 private:
  std::size_t Offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor lhs, const Tensor& rhs);
Tensor operator-(Tensor lhs, const Tensor& rhs);
Tensor operator*(Tensor lhs, double scale);
Tensor operator*(double scale, Tensor rhs);

// Sum of elementwise products of two equally-shaped tensors.
double FrobeniusInner(const Tensor& a, const Tensor& b);
double MaxAbs(const Tensor& t);
double MaxAbsDiff(const Tensor& a, const Tensor& b);
bool AllFinite(const Tensor& t);

// Splits a [n, ...] tensor into n tensors of the trailing shape, and back.
std::vector<Tensor> Unstack(const Tensor& stacked);
Tensor Stack(std::span<const Tensor> items);

}  // namespace gdbr

#endif  // GDBR_TENSOR_H_
