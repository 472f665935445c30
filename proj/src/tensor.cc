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

#include "gdbr/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "gdbr/error.h"

namespace gdbr {

std::size_t ShapeSize(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(ShapeSize(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (ShapeSize(shape_) != data_.size()) {
    throw DimensionError("tensor of shape " + ShapeString(shape_) + " given " +
                         std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::Offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index of rank " + std::to_string(index.size()) +
                         " into tensor " + ShapeString(shape_));
  }
  std::size_t offset = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) {
      throw DimensionError("index " + std::to_string(i) + " out of range on axis " +
                           std::to_string(axis) + " of " + ShapeString(shape_));
    }
    offset = offset * shape_[axis] + i;
    ++axis;
  }
  return offset;
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

namespace {

void RequireSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shapes " +
                         ShapeString(a.shape()) + " and " +
                         ShapeString(b.shape()) + " differ");
  }
}

}  // namespace

Tensor& Tensor::operator+=(const Tensor& other) {
  RequireSameShape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  RequireSameShape(*this, other, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

Tensor operator+(Tensor lhs, const Tensor& rhs) { return lhs += rhs; }
Tensor operator-(Tensor lhs, const Tensor& rhs) { return lhs -= rhs; }
Tensor operator*(Tensor lhs, double scale) { return lhs *= scale; }
Tensor operator*(double scale, Tensor rhs) { return rhs *= scale; }

double FrobeniusInner(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "frobenius inner product");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double MaxAbs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

double MaxAbsDiff(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "max abs diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

bool AllFinite(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<Tensor> Unstack(const Tensor& stacked) {
  if (stacked.rank() < 2) {
    throw DimensionError("cannot unstack tensor " +
                         ShapeString(stacked.shape()));
  }
  Shape item_shape(stacked.shape().begin() + 1, stacked.shape().end());
  const std::size_t n = stacked.dim(0);
  const std::size_t item_size = ShapeSize(item_shape);
  std::vector<Tensor> items;
  items.reserve(n);
  auto values = stacked.data();
  for (std::size_t i = 0; i < n; ++i) {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(i * item_size);
    items.emplace_back(item_shape,
                       std::vector<double>(first, first + static_cast<std::ptrdiff_t>(item_size)));
  }
  return items;
}

Tensor Stack(std::span<const Tensor> items) {
  if (items.empty()) throw DimensionError("cannot stack zero tensors");
  Shape shape{items.size()};
  shape.insert(shape.end(), items.front().shape().begin(),
               items.front().shape().end());
  std::vector<double> data;
  data.reserve(ShapeSize(shape));
  for (const Tensor& item : items) {
    RequireSameShape(items.front(), item, "stack");
    data.insert(data.end(), item.data().begin(), item.data().end());
  }
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace gdbr
