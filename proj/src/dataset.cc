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

#include "gdbr/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "gdbr/error.h"
#include "gdbr/random.h"

namespace gdbr {

Shape Dataset::sample_shape() const {
  if (inputs.rank() < 2) return {};
  return Shape(inputs.shape().begin() + 1, inputs.shape().end());
}

Tensor Dataset::sample(std::size_t i) const {
  if (i >= size()) {
    throw IndexError("sample " + std::to_string(i) + " of " +
                     std::to_string(size()));
  }
  const Shape shape = sample_shape();
  const std::size_t n = ShapeSize(shape);
  auto first = inputs.data().begin() + static_cast<std::ptrdiff_t>(i * n);
  return Tensor(shape, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
}

std::vector<std::vector<std::size_t>> Dataset::ClassPools() const {
  std::vector<std::vector<std::size_t>> pools(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) pools.at(labels[i]).push_back(i);
  return pools;
}

void ValidateDataset(const Dataset& data) {
  if (data.class_count == 0) throw SamplingError("dataset declares no classes");
  if (data.inputs.rank() < 2 || data.inputs.dim(0) != data.labels.size()) {
    throw SamplingError("dataset inputs " + ShapeString(data.inputs.shape()) +
                        " do not match " + std::to_string(data.labels.size()) +
                        " labels");
  }
  for (std::size_t label : data.labels) {
    if (label >= data.class_count) {
      throw SamplingError("label " + std::to_string(label) + " outside [0, " +
                          std::to_string(data.class_count) + ")");
    }
  }
}

Dataset Subset(const Dataset& data, std::span<const std::size_t> indices) {
  Shape shape = data.inputs.shape();
  shape[0] = indices.size();
  const std::size_t n = ShapeSize(data.sample_shape());
  std::vector<double> values;
  values.reserve(indices.size() * n);
  std::vector<std::size_t> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto first = data.inputs.data().begin() + static_cast<std::ptrdiff_t>(i * n);
    values.insert(values.end(), first, first + static_cast<std::ptrdiff_t>(n));
    labels.push_back(data.labels.at(i));
  }
  return {Tensor(std::move(shape), std::move(values)), std::move(labels),
          data.class_count};
}

DatasetSplit SplitHoldout(const Dataset& data, std::size_t holdout_per_class) {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
  for (const auto& pool : data.ClassPools()) {
    const std::size_t keep = pool.size() - std::min(pool.size(), holdout_per_class);
    train.insert(train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep));
    holdout.insert(holdout.end(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(holdout.begin(), holdout.end());
  return {Subset(data, train), Subset(data, holdout)};
}

Dataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw SamplingError("synthetic data needs at least 2 classes");
  if (spec.per_class == 0) throw SamplingError("synthetic data needs per_class >= 1");
  const std::size_t dims = ShapeSize(spec.input_shape);
  if (dims == 0) throw SamplingError("synthetic input shape is empty");

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> means(spec.classes, std::vector<double>(dims));
  for (auto& mean : means) {
    double norm = 0.0;
    for (double& v : mean) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : mean) v *= spec.separation / norm;
  }

  Shape shape{spec.classes * spec.per_class};
  shape.insert(shape.end(), spec.input_shape.begin(), spec.input_shape.end());
  std::vector<double> values;
  values.reserve(ShapeSize(shape));
  std::vector<std::size_t> labels;
  labels.reserve(spec.classes * spec.per_class);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      for (std::size_t d = 0; d < dims; ++d) values.push_back(means[c][d] + normal(rng));
      labels.push_back(c);
    }
  }
  return {Tensor(std::move(shape), std::move(values)), std::move(labels),
          spec.classes};
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string file)
      : bytes_(bytes), file_(std::move(file)) {}

  std::uint32_t ReadU32(const char* field) {
    Require(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> ReadBytes(std::size_t n, const char* field) {
    Require(n, field);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void Require(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(file_ + ": truncated " + field + " (need " +
                        std::to_string(n) + " bytes at offset " +
                        std::to_string(pos_) + ", file has " +
                        std::to_string(bytes_.size()) + ")");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::string file_;
  std::size_t pos_ = 0;
};

std::string Hex(std::uint32_t v) {
  std::ostringstream out;
  out << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
  return out.str();
}

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Dataset ParseIdx(std::span<const std::uint8_t> image_bytes,
                 std::span<const std::uint8_t> label_bytes) {
  ByteReader images(image_bytes, "images");
  const std::uint32_t image_magic = images.ReadU32("magic");
  if (image_magic != kImageMagic) {
    throw FormatError("images: bad magic " + Hex(image_magic) + ", expected " +
                      Hex(kImageMagic));
  }
  const std::size_t count = images.ReadU32("count");
  const std::size_t rows = images.ReadU32("rows");
  const std::size_t cols = images.ReadU32("cols");
  auto pixels = images.ReadBytes(count * rows * cols, "pixel data");

  ByteReader labels(label_bytes, "labels");
  const std::uint32_t label_magic = labels.ReadU32("magic");
  if (label_magic != kLabelMagic) {
    throw FormatError("labels: bad magic " + Hex(label_magic) + ", expected " +
                      Hex(kLabelMagic));
  }
  const std::size_t label_count = labels.ReadU32("count");
  if (label_count != count) {
    throw FormatError("count mismatch: images file has " + std::to_string(count) +
                      " items, labels file has " + std::to_string(label_count));
  }
  auto label_data = labels.ReadBytes(count, "label data");

  Dataset data;
  std::vector<double> values(pixels.size());
  std::transform(pixels.begin(), pixels.end(), values.begin(),
                 [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
  data.inputs = Tensor({count, 1, rows, cols}, std::move(values));
  data.labels.assign(label_data.begin(), label_data.end());
  std::size_t max_label = 0;
  for (std::size_t l : data.labels) max_label = std::max(max_label, l);
  data.class_count = max_label + 1;
  return data;
}

Dataset LoadIdxDataset(const std::filesystem::path& image_path,
                       const std::filesystem::path& label_path) {
  const auto images = ReadFile(image_path);
  const auto labels = ReadFile(label_path);
  try {
    return ParseIdx(images, labels);
  } catch (const FormatError& e) {
    throw FormatError(image_path.filename().string() + " / " +
                      label_path.filename().string() + ": " + e.what());
  }
}

void WriteDatasetCsv(const Dataset& data, std::ostream& out) {
  const std::size_t n = ShapeSize(data.sample_shape());
  out << "label";
  for (std::size_t d = 0; d < n; ++d) out << ",x" << d;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels[i];
    for (std::size_t d = 0; d < n; ++d) out << ',' << data.inputs[i * n + d];
    out << '\n';
  }
}

}  // namespace gdbr
