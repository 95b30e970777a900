/*
 * Copyright 2026 The SketchyGAN-desk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sketchygan/core/dual.hpp"

namespace sketchygan {

/// Extents of a rank-4 (batch, channels, height, width) array.
struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  constexpr std::size_t size() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(c) *
           static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  }
  constexpr std::size_t per_sample() const {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(w);
  }
  constexpr std::size_t plane() const {
    return static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  }
  constexpr bool operator==(const Shape&) const = default;

  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) +
           "," + std::to_string(w) + ")";
  }
};

/*
 * Dense NCHW array owning its storage. Value semantics; the autodiff tape
 * stores these by value and hands out const references.
 */
template <typename T>
class Tensor {
 public:
  using Scalar = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0)) : shape_(check(shape)), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(check(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw std::invalid_argument("Tensor: data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_.str());
    }
  }

  static Tensor scalar(T value) { return Tensor(Shape{1, 1, 1, 1}, value); }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  T& operator()(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  const T& operator()(int n, int c, int h, int w) const { return data_[offset(n, c, h, w)]; }

  /// Pointer to the first element of sample n.
  T* sample(int n) { return data_.data() + static_cast<std::size_t>(n) * shape_.per_sample(); }
  const T* sample(int n) const {
    return data_.data() + static_cast<std::size_t>(n) * shape_.per_sample();
  }

  Tensor& fill(T value) {
    std::fill(data_.begin(), data_.end(), value);
    return *this;
  }

  /// Reinterprets the extents; the element count must not change.
  Tensor reshaped(Shape shape) const {
    if (shape.size() != shape_.size()) {
      throw std::invalid_argument("Tensor::reshaped: " + shape_.str() + " -> " + shape.str());
    }
    Tensor out = *this;
    out.shape_ = shape;
    return out;
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = scalar_cast<U>(data_[i]);
    return Tensor<U>(shape_, std::move(out));
  }

  bool operator==(const Tensor&) const = default;

 private:
  static Shape check(Shape s) {
    if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) {
      throw std::invalid_argument("Tensor: negative extent in shape " + s.str());
    }
    return s;
  }

  Shape shape_{};
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

/// Tensor of tangent parts (zero for plain scalar tensors).
template <typename T>
Tensor<real_of_t<T>> tangent_of(const Tensor<T>& t) {
  Tensor<real_of_t<T>> out(t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = tangent(t[i]);
  return out;
}

/// Builds a dual tensor from primal and tangent parts of equal shape.
template <typename R>
Tensor<Dual<R>> make_dual(const Tensor<R>& value, const Tensor<R>& direction) {
  if (value.shape() != direction.shape()) {
    throw std::invalid_argument("make_dual: shape mismatch " + value.shape().str() + " vs " +
                                direction.shape().str());
  }
  Tensor<Dual<R>> out(value.shape());
  for (std::size_t i = 0; i < value.size(); ++i) out[i] = Dual<R>(value[i], direction[i]);
  return out;
}

}  // namespace sketchygan
