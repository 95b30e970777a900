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

#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <vector>

#include "sketchygan/core/ops.hpp"
#include "sketchygan/core/params.hpp"

namespace sketchygan::test {

template <typename T>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Tensor<T> out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(dist(rng));
  return out;
}

/// Same shape and the same bytes in every element.
template <typename T>
bool bit_identical(const Tensor<T>& a, const Tensor<T>& b) {
  return a.shape() == b.shape() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

/// Scalar with a distinct random weight on every coordinate of y.
template <typename T>
Var<T> project(Tape<T>& tape, Var<T> y, std::uint64_t seed) {
  return sum(mul(y, tape.constant(random_tensor<T>(y.shape(), seed))));
}

/// Parameter tensors as grad_check inputs, appended after the given leading inputs.
inline std::vector<TensorD> with_params(std::vector<TensorD> leading, const ParamSet<double>& p) {
  for (std::size_t i = 0; i < p.size(); ++i) leading.push_back(p.tensor(i));
  return leading;
}

/// Binds grad_check leaves [offset, offset + p.size()) to p's names.
inline void bind_params(Bound<double>& b, const ParamSet<double>& p,
                        std::span<const Var<double>> leaves, std::size_t offset) {
  for (std::size_t i = 0; i < p.size(); ++i) b.bind(p.name(i), leaves[offset + i]);
}

/// Direct six-loop cross-correlation with zero padding.
inline TensorD naive_conv2d(const TensorD& x, const TensorD& k, int stride, int pad) {
  const Shape xs = x.shape();
  const Shape ks = k.shape();
  const int ho = (xs.h + 2 * pad - ks.h) / stride + 1;
  const int wo = (xs.w + 2 * pad - ks.w) / stride + 1;
  TensorD out(Shape{xs.n, ks.n, ho, wo});
  for (int n = 0; n < xs.n; ++n) {
    for (int o = 0; o < ks.n; ++o) {
      for (int i = 0; i < ho; ++i) {
        for (int j = 0; j < wo; ++j) {
          double acc = 0.0;
          for (int c = 0; c < xs.c; ++c) {
            for (int a = 0; a < ks.h; ++a) {
              for (int b = 0; b < ks.w; ++b) {
                const int ih = i * stride - pad + a;
                const int iw = j * stride - pad + b;
                if (ih < 0 || iw < 0 || ih >= xs.h || iw >= xs.w) continue;
                acc += x(n, c, ih, iw) * k(o, c, a, b);
              }
            }
          }
          out(n, o, i, j) = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace sketchygan::test
