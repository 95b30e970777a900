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

#include "sketchygan/core/dual.hpp"

namespace sketchygan {

enum class Trans { kNo, kYes };

/*
 * Row-major C (M x N) = op(A) * op(B), or C += ... when `accumulate` is set.
 * op(A) is M x K and op(B) is K x N. Backed by Eigen for real scalars; dual
 * scalars split into primal and tangent products.
 */
template <typename T>
void gemm(Trans trans_a, Trans trans_b, int m, int n, int k, const T* a, const T* b, T* c,
          bool accumulate);

extern template void gemm<float>(Trans, Trans, int, int, int, const float*, const float*, float*,
                                 bool);
extern template void gemm<double>(Trans, Trans, int, int, int, const double*, const double*,
                                  double*, bool);
extern template void gemm<Dual<float>>(Trans, Trans, int, int, int, const Dual<float>*,
                                       const Dual<float>*, Dual<float>*, bool);
extern template void gemm<Dual<double>>(Trans, Trans, int, int, int, const Dual<double>*,
                                        const Dual<double>*, Dual<double>*, bool);

}  // namespace sketchygan
