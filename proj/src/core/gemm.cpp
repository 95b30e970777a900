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

#include "sketchygan/core/gemm.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace sketchygan {
namespace {

template <typename R>
using RowMat = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Operands are copied into Eigen-owned (aligned) storage: Eigen's small-product
// path peels loops by pointer alignment, which would make results depend on
// where the caller's buffers happen to sit.
template <typename R>
void real_gemm(Trans ta, Trans tb, int m, int n, int k, const R* a, const R* b, R* c,
               bool accumulate) {
  using Map = Eigen::Map<const RowMat<R>>;
  const RowMat<R> am = Map(a, ta == Trans::kNo ? m : k, ta == Trans::kNo ? k : m);
  const RowMat<R> bm = Map(b, tb == Trans::kNo ? k : n, tb == Trans::kNo ? n : k);
  RowMat<R> product(m, n);
  if (ta == Trans::kNo && tb == Trans::kNo) {
    product.noalias() = am * bm;
  } else if (ta == Trans::kNo) {
    product.noalias() = am * bm.transpose();
  } else if (tb == Trans::kNo) {
    product.noalias() = am.transpose() * bm;
  } else {
    product.noalias() = am.transpose() * bm.transpose();
  }
  Eigen::Map<RowMat<R>> cm(c, m, n);
  if (accumulate) {
    cm += product;
  } else {
    cm = product;
  }
}

template <typename R>
bool split(const Dual<R>* x, std::size_t count, std::vector<R>& v, std::vector<R>& d) {
  v.resize(count);
  d.resize(count);
  bool any_tangent = false;
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = x[i].v;
    d[i] = x[i].d;
    any_tangent = any_tangent || x[i].d != R(0);
  }
  return any_tangent;
}

// (Av + eps Ad)(Bv + eps Bd) = Av Bv + eps (Av Bd + Ad Bv); zero tangents are skipped.
template <typename R>
void dual_gemm(Trans ta, Trans tb, int m, int n, int k, const Dual<R>* a, const Dual<R>* b,
               Dual<R>* c, bool accumulate) {
  const auto a_count = static_cast<std::size_t>(m) * static_cast<std::size_t>(k);
  const auto b_count = static_cast<std::size_t>(k) * static_cast<std::size_t>(n);
  const auto c_count = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
  std::vector<R> av, ad, bv, bd, cv, cd;
  const bool a_tan = split(a, a_count, av, ad);
  const bool b_tan = split(b, b_count, bv, bd);
  if (accumulate) {
    split(c, c_count, cv, cd);
  } else {
    cv.assign(c_count, R(0));
    cd.assign(c_count, R(0));
  }
  real_gemm(ta, tb, m, n, k, av.data(), bv.data(), cv.data(), true);
  if (b_tan) real_gemm(ta, tb, m, n, k, av.data(), bd.data(), cd.data(), true);
  if (a_tan) real_gemm(ta, tb, m, n, k, ad.data(), bv.data(), cd.data(), true);
  for (std::size_t i = 0; i < c_count; ++i) c[i] = Dual<R>(cv[i], cd[i]);
}

}  // namespace

template <typename T>
void gemm(Trans trans_a, Trans trans_b, int m, int n, int k, const T* a, const T* b, T* c,
          bool accumulate) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (!accumulate) std::fill(c, c + static_cast<std::size_t>(m) * n, T(0));
    return;
  }
  if constexpr (is_dual_v<T>) {
    dual_gemm(trans_a, trans_b, m, n, k, a, b, c, accumulate);
  } else {
    real_gemm(trans_a, trans_b, m, n, k, a, b, c, accumulate);
  }
}

template void gemm<float>(Trans, Trans, int, int, int, const float*, const float*, float*, bool);
template void gemm<double>(Trans, Trans, int, int, int, const double*, const double*, double*,
                           bool);
template void gemm<Dual<float>>(Trans, Trans, int, int, int, const Dual<float>*,
                                const Dual<float>*, Dual<float>*, bool);
template void gemm<Dual<double>>(Trans, Trans, int, int, int, const Dual<double>*,
                                 const Dual<double>*, Dual<double>*, bool);

}  // namespace sketchygan
