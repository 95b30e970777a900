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

#include <span>
#include <vector>

#include "sketchygan/core/tape.hpp"

// Differentiable operations over Var<T>. Every op validates shapes and throws
// std::invalid_argument with the offending extents on mismatch. Instantiated
// for float, double, Dual<float> and Dual<double>.

namespace sketchygan {

// Elementwise arithmetic. Binary ops require identical shapes.
template <typename T>
Var<T> add(Var<T> a, Var<T> b);
template <typename T>
Var<T> sub(Var<T> a, Var<T> b);
template <typename T>
Var<T> mul(Var<T> a, Var<T> b);
/// s * x + offset.
template <typename T>
Var<T> affine(Var<T> x, double s, double offset);

template <typename T>
Var<T> sigmoid(Var<T> x);
template <typename T>
Var<T> tanh(Var<T> x);
template <typename T>
Var<T> leaky_relu(Var<T> x, double slope);
/// log(1 + exp(x)), overflow-safe.
template <typename T>
Var<T> softplus(Var<T> x);
template <typename T>
Var<T> abs(Var<T> x);
/// min(x, cap) elementwise; the gradient is cut where x >= cap.
template <typename T>
Var<T> clamp_max(Var<T> x, double cap);

/// Cross-correlation with a (Cout, Cin, kh, kw) kernel and symmetric zero padding.
template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, int stride, int padding);
/// Same, plus a per-output-channel bias of shape (1, Cout, 1, 1).
template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, Var<T> bias, int stride, int padding);

template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b);
template <typename T>
Var<T> concat_channels(std::span<const Var<T>> parts);
template <typename T>
Var<T> concat_batch(Var<T> a, Var<T> b);
template <typename T>
Var<T> slice_batch(Var<T> x, int begin, int count);

template <typename T>
Var<T> downsample_avg(Var<T> x, int factor);
template <typename T>
Var<T> upsample_nearest(Var<T> x, int factor);

/*
 * Per-sample, per-channel normalization over H x W followed by the affine
 * transform of the sample's class: tables are (K, C, 1, 1) and labels[n]
 * selects the row. With K = 1 and all labels 0 this is plain instance norm.
 */
template <typename T>
Var<T> cond_instance_norm(Var<T> x, std::span<const int> labels, Var<T> scale_table,
                          Var<T> shift_table, double eps);

/// (N, C, H, W) -> (N, C, 1, 1).
template <typename T>
Var<T> global_avg_pool(Var<T> x);
/// (N, C, H, W) -> (N, C*H*W, 1, 1).
template <typename T>
Var<T> flatten(Var<T> x);
/// Affine map of flattened samples: weights (Fout, Fin, 1, 1), bias (1, Fout, 1, 1).
template <typename T>
Var<T> dense(Var<T> x, Var<T> weights, Var<T> bias);
/// Row-wise softmax over each sample's flattened features.
template <typename T>
Var<T> softmax(Var<T> x);
template <typename T>
Var<T> log_softmax(Var<T> x);
/// (N, Z, 1, 1) -> (N, Z, h, w) by spatial replication.
template <typename T>
Var<T> broadcast_spatial(Var<T> z, int h, int w);

/// Reductions to a (1, 1, 1, 1) scalar.
template <typename T>
Var<T> sum(Var<T> x);
template <typename T>
Var<T> mean(Var<T> x);
/// mean |a - b| over all elements.
template <typename T>
Var<T> mean_abs_diff(Var<T> a, Var<T> b);

/*
 * Per-sample, per-channel min-max rescaling over H x W to [0, 1]. Channels
 * whose range is below 1e-6 map to 0.5 with zero gradient.
 */
template <typename T>
Var<T> minmax_normalize(Var<T> x);

/*
 * Focal classification loss averaged over the batch:
 * -(1 - p_t)^gamma * log p_t with p_t the softmax probability of labels[n].
 * gamma = 0 is plain cross-entropy.
 */
template <typename T>
Var<T> focal_loss(Var<T> logits, std::span<const int> labels, double gamma);

/// Value copy without gradient connection.
template <typename T>
Var<T> detach(Var<T> x);

template <typename T>
Var<T> operator+(Var<T> a, Var<T> b) {
  return add(a, b);
}
template <typename T>
Var<T> operator-(Var<T> a, Var<T> b) {
  return sub(a, b);
}
template <typename T>
Var<T> operator*(Var<T> a, Var<T> b) {
  return mul(a, b);
}
template <typename T>
Var<T> operator-(Var<T> a) {
  return affine(a, -1.0, 0.0);
}
template <typename T>
Var<T> operator*(Var<T> a, double s) {
  return affine(a, s, 0.0);
}
template <typename T>
Var<T> operator*(double s, Var<T> a) {
  return affine(a, s, 0.0);
}
template <typename T>
Var<T> operator+(Var<T> a, double s) {
  return affine(a, 1.0, s);
}
template <typename T>
Var<T> operator-(double s, Var<T> a) {
  return affine(a, -1.0, s);
}

#define SKETCHYGAN_DECLARE_OPS(T)                                                          \
  extern template Var<T> add(Var<T>, Var<T>);                                             \
  extern template Var<T> sub(Var<T>, Var<T>);                                             \
  extern template Var<T> mul(Var<T>, Var<T>);                                             \
  extern template Var<T> affine(Var<T>, double, double);                                  \
  extern template Var<T> sigmoid(Var<T>);                                                 \
  extern template Var<T> tanh(Var<T>);                                                    \
  extern template Var<T> leaky_relu(Var<T>, double);                                      \
  extern template Var<T> softplus(Var<T>);                                                \
  extern template Var<T> abs(Var<T>);                                                     \
  extern template Var<T> clamp_max(Var<T>, double);                                       \
  extern template Var<T> conv2d(Var<T>, Var<T>, int, int);                                \
  extern template Var<T> conv2d(Var<T>, Var<T>, Var<T>, int, int);                        \
  extern template Var<T> concat_channels(Var<T>, Var<T>);                                 \
  extern template Var<T> concat_channels(std::span<const Var<T>>);                        \
  extern template Var<T> concat_batch(Var<T>, Var<T>);                                    \
  extern template Var<T> slice_batch(Var<T>, int, int);                                   \
  extern template Var<T> downsample_avg(Var<T>, int);                                     \
  extern template Var<T> upsample_nearest(Var<T>, int);                                   \
  extern template Var<T> cond_instance_norm(Var<T>, std::span<const int>, Var<T>, Var<T>, \
                                            double);                                      \
  extern template Var<T> global_avg_pool(Var<T>);                                         \
  extern template Var<T> flatten(Var<T>);                                                 \
  extern template Var<T> dense(Var<T>, Var<T>, Var<T>);                                   \
  extern template Var<T> softmax(Var<T>);                                                 \
  extern template Var<T> log_softmax(Var<T>);                                             \
  extern template Var<T> broadcast_spatial(Var<T>, int, int);                             \
  extern template Var<T> sum(Var<T>);                                                     \
  extern template Var<T> mean(Var<T>);                                                    \
  extern template Var<T> mean_abs_diff(Var<T>, Var<T>);                                   \
  extern template Var<T> minmax_normalize(Var<T>);                                        \
  extern template Var<T> focal_loss(Var<T>, std::span<const int>, double);                \
  extern template Var<T> detach(Var<T>);

SKETCHYGAN_DECLARE_OPS(float)
SKETCHYGAN_DECLARE_OPS(double)
SKETCHYGAN_DECLARE_OPS(Dual<float>)
SKETCHYGAN_DECLARE_OPS(Dual<double>)
#undef SKETCHYGAN_DECLARE_OPS

}  // namespace sketchygan
