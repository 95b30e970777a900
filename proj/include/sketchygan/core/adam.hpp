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

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sketchygan/core/params.hpp"

namespace sketchygan {

template <typename T>
struct AdamState {
  ParamSet<T> m;
  ParamSet<T> v;
  std::int64_t step = 0;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Zero moments shaped like `params`.
template <typename T>
AdamState<T> make_adam_state(const ParamSet<T>& params, double beta1 = 0.5, double beta2 = 0.999,
                             double eps = 1e-8) {
  AdamState<T> s;
  s.m = params.filled_like(T(0));
  s.v = params.filled_like(T(0));
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

/// One bias-corrected Adam update of `params` in place.
template <typename T>
void adam_step(ParamSet<T>& params, const ParamSet<T>& grads, AdamState<T>& state, double lr) {
  if (!params.same_layout(grads)) {
    throw std::invalid_argument("adam_step: gradient layout does not match parameters");
  }
  if (!params.same_layout(state.m) || !params.same_layout(state.v)) {
    throw std::invalid_argument("adam_step: moment layout does not match parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T step_size = static_cast<T>(lr / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  const T eps = static_cast<T>(state.eps);
  // Plain loop: Eigen's fast-math packet sqrt is not bit-exact with std::sqrt,
  // which made updates depend on buffer alignment.
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* p = params.tensor(i).data();
    const T* g = grads.tensor(i).data();
    T* m = state.m.tensor(i).data();
    T* v = state.v.tensor(i).data();
    const std::size_t n = params.tensor(i).size();
    for (std::size_t j = 0; j < n; ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      p[j] -= step_size * m[j] / (std::sqrt(v[j] * inv_c2) + eps);
    }
  }
}

}  // namespace sketchygan
