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

#include <gtest/gtest.h>

#include <cmath>

#include "gdbr/error.h"

namespace gdbr {
namespace {

TEST(TensorTest, ShapeAndSize) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.dim(1), 3u);
  EXPECT_EQ(ShapeString(t.shape()), "[2x3]");
  for (double v : t.data()) EXPECT_EQ(v, 1.5);
}

TEST(TensorTest, RejectsMismatchedData) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(TensorTest, RowMajorIndexing) {
  const Tensor t = Tensor::Matrix(2, 3, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(t.at({1, 0}), 3.0);
  EXPECT_EQ(t.at({0, 2}), 2.0);
  EXPECT_THROW(t.at({2, 0}), DimensionError);
  EXPECT_THROW(t.at({0}), DimensionError);
}

TEST(TensorTest, ReshapeKeepsData) {
  const Tensor t = Tensor::Matrix(2, 2, {1, 2, 3, 4});
  const Tensor r = t.Reshaped({4, 1});
  EXPECT_EQ(r.values(), t.values());
  EXPECT_THROW(t.Reshaped({3}), DimensionError);
}

TEST(TensorTest, Arithmetic) {
  const Tensor a = Tensor::Vector({1, 2});
  const Tensor b = Tensor::Vector({3, 5});
  EXPECT_EQ((a + b).values(), (std::vector<double>{4, 7}));
  EXPECT_EQ((b - a).values(), (std::vector<double>{2, 3}));
  EXPECT_EQ((2.0 * a).values(), (std::vector<double>{2, 4}));
  EXPECT_THROW(a + Tensor::Vector({1}), DimensionError);
  EXPECT_EQ(FrobeniusInner(a, b), 13.0);
  EXPECT_EQ(MaxAbsDiff(a, b), 3.0);
}

TEST(TensorTest, StackRoundTrip) {
  const Tensor s({3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6});
  const auto parts = Unstack(s);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1].values(), (std::vector<double>{3, 4}));
  EXPECT_EQ(Stack(parts), s);
}

TEST(TensorTest, FiniteCheck) {
  Tensor t({2});
  EXPECT_TRUE(AllFinite(t));
  t[1] = std::nan("");
  EXPECT_FALSE(AllFinite(t));
}

}  // namespace
}  // namespace gdbr
