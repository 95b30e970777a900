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

#include "sketchygan/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sketchygan/core/gemm.hpp"

namespace sketchygan {
namespace {

template <typename T>
T exp_s(const T& x) {
  using std::exp;
  return exp(x);
}
template <typename T>
T log_s(const T& x) {
  using std::log;
  return log(x);
}
template <typename T>
T log1p_s(const T& x) {
  using std::log1p;
  return log1p(x);
}
template <typename T>
T sqrt_s(const T& x) {
  using std::sqrt;
  return sqrt(x);
}
template <typename T>
T tanh_s(const T& x) {
  using std::tanh;
  return tanh(x);
}
template <typename T>
T pow_s(const T& x, double p) {
  using std::pow;
  return pow(x, static_cast<real_of_t<T>>(p));
}
template <typename T>
T sigmoid_s(const T& x) {
  // Split on sign so exp never overflows.
  if (x >= T(0)) return T(1) / (T(1) + exp_s(-x));
  const T e = exp_s(x);
  return e / (T(1) + e);
}

[[noreturn]] void fail(const std::string& op, const std::string& what) {
  throw std::invalid_argument(op + ": " + what);
}

template <typename T>
Tape<T>& same_tape(const char* op, const Var<T>& a, const Var<T>& b) {
  if (!a.valid() || !b.valid()) fail(op, "invalid variable");
  if (a.tape_ptr() != b.tape_ptr()) fail(op, "operands recorded on different tapes");
  return a.tape();
}

template <typename T>
void require_same_shape(const char* op, const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) {
    fail(op, "shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  }
}

// y = f(x) elementwise; df(x, y) gives dy/dx.
template <typename T, typename F, typename DF>
Var<T> unary(Var<T> x, F f, DF df) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, df](Tape<T>& tape, const Tensor<T>& y, const Tensor<T>& g) {
                           const Tensor<T>& xv = tape.value(xid);
                           Tensor<T> gx(xv.shape());
                           for (std::size_t i = 0; i < g.size(); ++i) gx[i] = g[i] * df(xv[i], y[i]);
                           tape.accumulate(xid, gx);
                         });
}

template <typename T>
Var<T> scalar_result(Tape<T>& tape, T value, bool requires_grad, typename Tape<T>::Backward fn) {
  return tape.record(Tensor<T>::scalar(value), requires_grad, std::move(fn));
}

// Rows: r = (c * kh + i) * kw + j; columns: n * P + oh * Wo + ow.
template <typename T>
void im2col(const Tensor<T>& x, int kh, int kw, int stride, int pad, int ho, int wo,
            std::vector<T>& cols) {
  const Shape s = x.shape();
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  const std::size_t ncols = static_cast<std::size_t>(s.n) * p;
  cols.assign(static_cast<std::size_t>(s.c) * kh * kw * ncols, T(0));
  for (int c = 0; c < s.c; ++c) {
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        T* row = cols.data() + ((static_cast<std::size_t>(c) * kh + i) * kw + j) * ncols;
        for (int n = 0; n < s.n; ++n) {
          const T* plane = x.data() + (static_cast<std::size_t>(n) * s.c + c) * s.plane();
          T* dst = row + static_cast<std::size_t>(n) * p;
          for (int oh = 0; oh < ho; ++oh) {
            const int ih = oh * stride - pad + i;
            if (ih < 0 || ih >= s.h) continue;
            const T* src = plane + static_cast<std::size_t>(ih) * s.w;
            T* out = dst + static_cast<std::size_t>(oh) * wo;
            for (int ow = 0; ow < wo; ++ow) {
              const int iw = ow * stride - pad + j;
              if (iw >= 0 && iw < s.w) out[ow] = src[iw];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const std::vector<T>& cols, int kh, int kw, int stride, int pad, int ho, int wo,
            Tensor<T>& gx) {
  const Shape s = gx.shape();
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  const std::size_t ncols = static_cast<std::size_t>(s.n) * p;
  for (int c = 0; c < s.c; ++c) {
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        const T* row = cols.data() + ((static_cast<std::size_t>(c) * kh + i) * kw + j) * ncols;
        for (int n = 0; n < s.n; ++n) {
          T* plane = gx.data() + (static_cast<std::size_t>(n) * s.c + c) * s.plane();
          const T* src = row + static_cast<std::size_t>(n) * p;
          for (int oh = 0; oh < ho; ++oh) {
            const int ih = oh * stride - pad + i;
            if (ih < 0 || ih >= s.h) continue;
            T* dst = plane + static_cast<std::size_t>(ih) * s.w;
            const T* in = src + static_cast<std::size_t>(oh) * wo;
            for (int ow = 0; ow < wo; ++ow) {
              const int iw = ow * stride - pad + j;
              if (iw >= 0 && iw < s.w) dst[iw] += in[ow];
            }
          }
        }
      }
    }
  }
}

template <typename T>
Var<T> conv2d_impl(Var<T> x, Var<T> k, const Var<T>* bias, int stride, int pad) {
  Tape<T>& tape = same_tape("conv2d", x, k);
  const Shape xs = x.shape();
  const Shape ks = k.shape();
  if (stride < 1) fail("conv2d", "stride must be >= 1, got " + std::to_string(stride));
  if (pad < 0) fail("conv2d", "padding must be >= 0, got " + std::to_string(pad));
  if (ks.c != xs.c) {
    fail("conv2d", "kernel in-channels " + std::to_string(ks.c) + " != input channels " +
                       std::to_string(xs.c) + " (input " + xs.str() + ", kernel " + ks.str() +
                       ")");
  }
  const int ho = (xs.h + 2 * pad - ks.h) / stride + 1;
  const int wo = (xs.w + 2 * pad - ks.w) / stride + 1;
  if (xs.h + 2 * pad < ks.h || xs.w + 2 * pad < ks.w || ho < 1 || wo < 1) {
    fail("conv2d", "kernel " + ks.str() + " larger than padded input " + xs.str());
  }
  if (bias != nullptr) {
    same_tape("conv2d", x, *bias);
    if (bias->shape() != Shape{1, ks.n, 1, 1}) {
      fail("conv2d", "bias shape " + bias->shape().str() + " expected (1," +
                         std::to_string(ks.n) + ",1,1)");
    }
  }
  const int cout = ks.n;
  const int ck = ks.c * ks.h * ks.w;
  const int p = ho * wo;
  const int np = xs.n * p;

  std::vector<T> cols;
  im2col(x.value(), ks.h, ks.w, stride, pad, ho, wo, cols);
  std::vector<T> out_mat(static_cast<std::size_t>(cout) * np);
  gemm(Trans::kNo, Trans::kNo, cout, np, ck, k.value().data(), cols.data(), out_mat.data(), false);

  Tensor<T> out(Shape{xs.n, cout, ho, wo});
  const Tensor<T>* bv = bias != nullptr ? &bias->value() : nullptr;
  for (int n = 0; n < xs.n; ++n) {
    for (int co = 0; co < cout; ++co) {
      const T b = bv != nullptr ? (*bv)[static_cast<std::size_t>(co)] : T(0);
      const T* src = out_mat.data() + static_cast<std::size_t>(co) * np +
                     static_cast<std::size_t>(n) * p;
      T* dst = out.data() + (static_cast<std::size_t>(n) * cout + co) * p;
      for (int i = 0; i < p; ++i) dst[i] = src[i] + b;
    }
  }

  const bool needs = x.requires_grad() || k.requires_grad() ||
                     (bias != nullptr && bias->requires_grad());
  const int xid = x.id();
  const int kid = k.id();
  const int bid = bias != nullptr ? bias->id() : -1;
  return tape.record(
      std::move(out), needs,
      [=](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
        std::vector<T> gmat(static_cast<std::size_t>(cout) * np);
        for (int n = 0; n < xs.n; ++n) {
          for (int co = 0; co < cout; ++co) {
            const T* src = g.data() + (static_cast<std::size_t>(n) * cout + co) * p;
            T* dst = gmat.data() + static_cast<std::size_t>(co) * np +
                     static_cast<std::size_t>(n) * p;
            std::copy(src, src + p, dst);
          }
        }
        if (bid >= 0 && t.requires_grad(bid)) {
          Tensor<T>& gb = t.grad_buffer(bid);
          for (int co = 0; co < cout; ++co) {
            T acc(0);
            const T* row = gmat.data() + static_cast<std::size_t>(co) * np;
            for (int i = 0; i < np; ++i) acc += row[i];
            gb[static_cast<std::size_t>(co)] += acc;
          }
        }
        const bool gk = t.requires_grad(kid);
        const bool gx = t.requires_grad(xid);
        if (!gk && !gx) return;
        std::vector<T> cols_b;
        if (gk) {
          im2col(t.value(xid), ks.h, ks.w, stride, pad, ho, wo, cols_b);
          Tensor<T>& gkb = t.grad_buffer(kid);
          gemm(Trans::kNo, Trans::kYes, cout, ck, np, gmat.data(), cols_b.data(), gkb.data(), true);
        }
        if (gx) {
          cols_b.assign(static_cast<std::size_t>(ck) * np, T(0));
          gemm(Trans::kYes, Trans::kNo, ck, np, cout, t.value(kid).data(), gmat.data(),
               cols_b.data(), false);
          Tensor<T>& gxb = t.grad_buffer(xid);
          col2im(cols_b, ks.h, ks.w, stride, pad, ho, wo, gxb);
        }
      });
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape("add", a, b);
  require_same_shape("add", a, b);
  Tensor<T> out(a.shape());
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const int aid = a.id();
  const int bid = b.id();
  return tape.record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [aid, bid](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       t.accumulate(aid, g);
                       t.accumulate(bid, g);
                     });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape("sub", a, b);
  require_same_shape("sub", a, b);
  Tensor<T> out(a.shape());
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const int aid = a.id();
  const int bid = b.id();
  return tape.record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [aid, bid](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       t.accumulate(aid, g);
                       if (t.requires_grad(bid)) {
                         Tensor<T> neg(g.shape());
                         for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
                         t.accumulate(bid, neg);
                       }
                     });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape("mul", a, b);
  require_same_shape("mul", a, b);
  Tensor<T> out(a.shape());
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const int aid = a.id();
  const int bid = b.id();
  return tape.record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [aid, bid](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(aid)) {
                         const Tensor<T>& bv = t.value(bid);
                         Tensor<T> ga(g.shape());
                         for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * bv[i];
                         t.accumulate(aid, ga);
                       }
                       if (t.requires_grad(bid)) {
                         const Tensor<T>& av = t.value(aid);
                         Tensor<T> gb(g.shape());
                         for (std::size_t i = 0; i < g.size(); ++i) gb[i] = g[i] * av[i];
                         t.accumulate(bid, gb);
                       }
                     });
}

template <typename T>
Var<T> affine(Var<T> x, double s, double offset) {
  const T ts = T(static_cast<real_of_t<T>>(s));
  const T to = T(static_cast<real_of_t<T>>(offset));
  return unary(
      x, [ts, to](const T& v) { return ts * v + to; }, [ts](const T&, const T&) { return ts; });
}

template <typename T>
Var<T> sigmoid(Var<T> x) {
  return unary(
      x, [](const T& v) { return sigmoid_s(v); },
      [](const T&, const T& y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> tanh(Var<T> x) {
  return unary(
      x, [](const T& v) { return tanh_s(v); }, [](const T&, const T& y) { return T(1) - y * y; });
}

template <typename T>
Var<T> leaky_relu(Var<T> x, double slope) {
  const T s = T(static_cast<real_of_t<T>>(slope));
  return unary(
      x, [s](const T& v) { return v < T(0) ? s * v : v; },
      [s](const T& v, const T&) { return v < T(0) ? s : T(1); });
}

template <typename T>
Var<T> softplus(Var<T> x) {
  return unary(
      x,
      [](const T& v) {
        const T pos = v > T(0) ? v : T(0);
        const T neg_abs = v > T(0) ? -v : v;
        return pos + log1p_s(exp_s(neg_abs));
      },
      [](const T& v, const T&) { return sigmoid_s(v); });
}

template <typename T>
Var<T> abs(Var<T> x) {
  return unary(
      x, [](const T& v) { return v < T(0) ? -v : v; },
      [](const T& v, const T&) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Var<T> clamp_max(Var<T> x, double cap) {
  const T c = T(static_cast<real_of_t<T>>(cap));
  return unary(
      x, [c](const T& v) { return v < c ? v : c; },
      [c](const T& v, const T&) { return v < c ? T(1) : T(0); });
}

template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, int stride, int padding) {
  return conv2d_impl<T>(input, kernel, nullptr, stride, padding);
}

template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernel, Var<T> bias, int stride, int padding) {
  return conv2d_impl<T>(input, kernel, &bias, stride, padding);
}

template <typename T>
Var<T> concat_channels(std::span<const Var<T>> parts) {
  if (parts.empty()) fail("concat_channels", "no inputs");
  Tape<T>& tape = parts.front().tape();
  const Shape first = parts.front().shape();
  int channels = 0;
  bool needs = false;
  for (const Var<T>& v : parts) {
    same_tape("concat_channels", parts.front(), v);
    const Shape s = v.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      fail("concat_channels", "N/H/W mismatch " + first.str() + " vs " + s.str());
    }
    channels += s.c;
    needs = needs || v.requires_grad();
  }
  const Shape os{first.n, channels, first.h, first.w};
  Tensor<T> out(os);
  const std::size_t plane = os.plane();
  std::vector<int> ids;
  std::vector<int> offsets;
  int c0 = 0;
  for (const Var<T>& v : parts) {
    const Tensor<T>& src = v.value();
    const int c = src.shape().c;
    for (int n = 0; n < os.n; ++n) {
      std::copy(src.sample(n), src.sample(n) + static_cast<std::size_t>(c) * plane,
                out.sample(n) + static_cast<std::size_t>(c0) * plane);
    }
    ids.push_back(v.id());
    offsets.push_back(c0);
    c0 += c;
  }
  return tape.record(std::move(out), needs,
                     [ids, offsets, os](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       const std::size_t plane = os.plane();
                       for (std::size_t k = 0; k < ids.size(); ++k) {
                         if (!t.requires_grad(ids[k])) continue;
                         const Shape s = t.value(ids[k]).shape();
                         if (s.size() == 0) continue;
                         Tensor<T>& gb = t.grad_buffer(ids[k]);
                         const std::size_t len = static_cast<std::size_t>(s.c) * plane;
                         for (int n = 0; n < os.n; ++n) {
                           const T* src = g.sample(n) + static_cast<std::size_t>(offsets[k]) * plane;
                           T* dst = gb.sample(n);
                           for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
                         }
                       }
                     });
}

template <typename T>
Var<T> concat_channels(Var<T> a, Var<T> b) {
  const Var<T> parts[2] = {a, b};
  return concat_channels<T>(std::span<const Var<T>>(parts, 2));
}

template <typename T>
Var<T> concat_batch(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape("concat_batch", a, b);
  const Shape as = a.shape();
  const Shape bs = b.shape();
  if (as.c != bs.c || as.h != bs.h || as.w != bs.w) {
    fail("concat_batch", "C/H/W mismatch " + as.str() + " vs " + bs.str());
  }
  Tensor<T> out(Shape{as.n + bs.n, as.c, as.h, as.w});
  std::copy(a.value().data(), a.value().data() + as.size(), out.data());
  std::copy(b.value().data(), b.value().data() + bs.size(), out.data() + as.size());
  const int aid = a.id();
  const int bid = b.id();
  const std::size_t split = as.size();
  return tape.record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [aid, bid, split](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(aid)) {
                         Tensor<T>& ga = t.grad_buffer(aid);
                         for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                       }
                       if (t.requires_grad(bid)) {
                         Tensor<T>& gb = t.grad_buffer(bid);
                         for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[split + i];
                       }
                     });
}

template <typename T>
Var<T> slice_batch(Var<T> x, int begin, int count) {
  const Shape s = x.shape();
  if (begin < 0 || count < 0 || begin + count > s.n) {
    fail("slice_batch", "range [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                            ") outside batch of " + std::to_string(s.n));
  }
  Tensor<T> out(Shape{count, s.c, s.h, s.w});
  const std::size_t ps = s.per_sample();
  std::copy(x.value().sample(begin), x.value().sample(begin) + ps * count, out.data());
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, begin, ps](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           T* dst = gx.data() + static_cast<std::size_t>(begin) * ps;
                           for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
                         });
}

template <typename T>
Var<T> downsample_avg(Var<T> x, int factor) {
  const Shape s = x.shape();
  if (factor < 1) fail("downsample_avg", "factor must be >= 1");
  if (s.h % factor != 0 || s.w % factor != 0) {
    fail("downsample_avg", "extent " + s.str() + " not divisible by factor " +
                               std::to_string(factor));
  }
  const Shape os{s.n, s.c, s.h / factor, s.w / factor};
  Tensor<T> out(os);
  const Tensor<T>& xv = x.value();
  const T inv = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(factor * factor));
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      for (int i = 0; i < os.h; ++i) {
        for (int j = 0; j < os.w; ++j) {
          T acc(0);
          for (int a = 0; a < factor; ++a) {
            for (int b = 0; b < factor; ++b) acc += xv(n, c, i * factor + a, j * factor + b);
          }
          out(n, c, i, j) = acc * inv;
        }
      }
    }
  }
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, factor, os, inv](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           for (int n = 0; n < os.n; ++n) {
                             for (int c = 0; c < os.c; ++c) {
                               for (int i = 0; i < os.h; ++i) {
                                 for (int j = 0; j < os.w; ++j) {
                                   const T v = g(n, c, i, j) * inv;
                                   for (int a = 0; a < factor; ++a) {
                                     for (int b = 0; b < factor; ++b) {
                                       gx(n, c, i * factor + a, j * factor + b) += v;
                                     }
                                   }
                                 }
                               }
                             }
                           }
                         });
}

template <typename T>
Var<T> upsample_nearest(Var<T> x, int factor) {
  const Shape s = x.shape();
  if (factor < 1) fail("upsample_nearest", "factor must be >= 1");
  const Shape os{s.n, s.c, s.h * factor, s.w * factor};
  Tensor<T> out(os);
  const Tensor<T>& xv = x.value();
  for (int n = 0; n < os.n; ++n) {
    for (int c = 0; c < os.c; ++c) {
      for (int i = 0; i < os.h; ++i) {
        for (int j = 0; j < os.w; ++j) out(n, c, i, j) = xv(n, c, i / factor, j / factor);
      }
    }
  }
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, factor, os](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           for (int n = 0; n < os.n; ++n) {
                             for (int c = 0; c < os.c; ++c) {
                               for (int i = 0; i < os.h; ++i) {
                                 for (int j = 0; j < os.w; ++j) {
                                   gx(n, c, i / factor, j / factor) += g(n, c, i, j);
                                 }
                               }
                             }
                           }
                         });
}

template <typename T>
Var<T> cond_instance_norm(Var<T> x, std::span<const int> labels, Var<T> scale_table,
                          Var<T> shift_table, double eps) {
  Tape<T>& tape = same_tape("cond_instance_norm", x, scale_table);
  same_tape("cond_instance_norm", x, shift_table);
  const Shape s = x.shape();
  const Shape ts = scale_table.shape();
  if (shift_table.shape() != ts) {
    fail("cond_instance_norm", "scale/shift table shapes differ " + ts.str() + " vs " +
                                   shift_table.shape().str());
  }
  if (ts.c != s.c || ts.h != 1 || ts.w != 1) {
    fail("cond_instance_norm", "tables " + ts.str() + " do not hold " + std::to_string(s.c) +
                                   "-length vectors for input " + s.str());
  }
  if (static_cast<int>(labels.size()) != s.n) {
    fail("cond_instance_norm", "expected " + std::to_string(s.n) + " labels, got " +
                                   std::to_string(labels.size()));
  }
  for (int label : labels) {
    if (label < 0 || label >= ts.n) {
      fail("cond_instance_norm", "unknown label " + std::to_string(label) + " (tables hold " +
                                     std::to_string(ts.n) + " classes)");
    }
  }
  const std::size_t m = s.plane();
  const T inv_m = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(m));
  const T teps = T(static_cast<real_of_t<T>>(eps));
  std::vector<T> means(static_cast<std::size_t>(s.n) * s.c);
  std::vector<T> inv_std(means.size());
  Tensor<T> out(s);
  const Tensor<T>& xv = x.value();
  const Tensor<T>& gamma = scale_table.value();
  const Tensor<T>& beta = shift_table.value();
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const std::size_t g = static_cast<std::size_t>(n) * s.c + c;
      const T* src = xv.data() + g * m;
      T mu(0);
      for (std::size_t i = 0; i < m; ++i) mu += src[i];
      mu *= inv_m;
      T var(0);
      for (std::size_t i = 0; i < m; ++i) {
        const T d = src[i] - mu;
        var += d * d;
      }
      var *= inv_m;
      const T is = T(1) / sqrt_s(var + teps);
      means[g] = mu;
      inv_std[g] = is;
      const std::size_t row = static_cast<std::size_t>(labels[static_cast<std::size_t>(n)]) * s.c + c;
      const T ga = gamma[row];
      const T be = beta[row];
      T* dst = out.data() + g * m;
      for (std::size_t i = 0; i < m; ++i) dst[i] = ga * ((src[i] - mu) * is) + be;
    }
  }
  const bool needs =
      x.requires_grad() || scale_table.requires_grad() || shift_table.requires_grad();
  const int xid = x.id();
  const int gid = scale_table.id();
  const int bid = shift_table.id();
  std::vector<int> lab(labels.begin(), labels.end());
  return tape.record(
      std::move(out), needs,
      [=, means = std::move(means), inv_std = std::move(inv_std)](Tape<T>& t, const Tensor<T>&,
                                                                  const Tensor<T>& gout) {
        const Tensor<T>& xv = t.value(xid);
        const Tensor<T>& gamma = t.value(gid);
        const bool want_x = t.requires_grad(xid);
        const bool want_g = t.requires_grad(gid);
        const bool want_b = t.requires_grad(bid);
        Tensor<T>* gx = want_x ? &t.grad_buffer(xid) : nullptr;
        Tensor<T>* gg = want_g ? &t.grad_buffer(gid) : nullptr;
        Tensor<T>* gb = want_b ? &t.grad_buffer(bid) : nullptr;
        std::vector<T> xhat(m);
        for (int n = 0; n < s.n; ++n) {
          for (int c = 0; c < s.c; ++c) {
            const std::size_t g = static_cast<std::size_t>(n) * s.c + c;
            const std::size_t row = static_cast<std::size_t>(lab[static_cast<std::size_t>(n)]) * s.c + c;
            const T* src = xv.data() + g * m;
            const T* go = gout.data() + g * m;
            T sum_g(0);
            T sum_gx(0);
            for (std::size_t i = 0; i < m; ++i) {
              xhat[i] = (src[i] - means[g]) * inv_std[g];
              sum_g += go[i];
              sum_gx += go[i] * xhat[i];
            }
            if (gb != nullptr) (*gb)[row] += sum_g;
            if (gg != nullptr) (*gg)[row] += sum_gx;
            if (gx != nullptr) {
              // dx = gamma * inv_std / m * (m g - sum g - xhat * sum(g xhat))
              const T ga = gamma[row];
              const T k = ga * inv_std[g] * inv_m;
              const T mm = T(static_cast<real_of_t<T>>(m));
              T* dst = gx->data() + g * m;
              for (std::size_t i = 0; i < m; ++i) {
                dst[i] += k * (mm * go[i] - sum_g - xhat[i] * sum_gx);
              }
            }
          }
        }
      });
}

template <typename T>
Var<T> global_avg_pool(Var<T> x) {
  const Shape s = x.shape();
  const std::size_t m = s.plane();
  if (m == 0) fail("global_avg_pool", "empty spatial extent " + s.str());
  const T inv = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(m));
  Tensor<T> out(Shape{s.n, s.c, 1, 1});
  const Tensor<T>& xv = x.value();
  for (std::size_t g = 0; g < out.size(); ++g) {
    T acc(0);
    for (std::size_t i = 0; i < m; ++i) acc += xv[g * m + i];
    out[g] = acc * inv;
  }
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, m, inv](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           for (std::size_t k = 0; k < g.size(); ++k) {
                             const T v = g[k] * inv;
                             for (std::size_t i = 0; i < m; ++i) gx[k * m + i] += v;
                           }
                         });
}

template <typename T>
Var<T> flatten(Var<T> x) {
  const Shape s = x.shape();
  const Shape os{s.n, static_cast<int>(s.per_sample()), 1, 1};
  const int xid = x.id();
  return x.tape().record(x.value().reshaped(os), x.requires_grad(),
                         [xid, s](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           t.accumulate(xid, g.reshaped(s));
                         });
}

template <typename T>
Var<T> dense(Var<T> x, Var<T> weights, Var<T> bias) {
  Tape<T>& tape = same_tape("dense", x, weights);
  same_tape("dense", x, bias);
  const Shape xs = x.shape();
  const Shape ws = weights.shape();
  const int fin = static_cast<int>(xs.per_sample());
  if (ws.c * ws.h * ws.w != fin) {
    fail("dense", "weights " + ws.str() + " expect " + std::to_string(ws.c * ws.h * ws.w) +
                      " inputs, got " + std::to_string(fin) + " from " + xs.str());
  }
  const int fout = ws.n;
  if (bias.shape() != Shape{1, fout, 1, 1}) {
    fail("dense", "bias shape " + bias.shape().str() + " expected (1," + std::to_string(fout) +
                      ",1,1)");
  }
  Tensor<T> out(Shape{xs.n, fout, 1, 1});
  gemm(Trans::kNo, Trans::kYes, xs.n, fout, fin, x.value().data(), weights.value().data(),
       out.data(), false);
  const Tensor<T>& bv = bias.value();
  for (int n = 0; n < xs.n; ++n) {
    for (int o = 0; o < fout; ++o) out[static_cast<std::size_t>(n) * fout + o] += bv[o];
  }
  const int xid = x.id();
  const int wid = weights.id();
  const int bid = bias.id();
  const int batch = xs.n;
  return tape.record(
      std::move(out), x.requires_grad() || weights.requires_grad() || bias.requires_grad(),
      [=](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
        if (t.requires_grad(xid)) {
          Tensor<T>& gx = t.grad_buffer(xid);
          gemm(Trans::kNo, Trans::kNo, batch, fin, fout, g.data(), t.value(wid).data(), gx.data(),
               true);
        }
        if (t.requires_grad(wid)) {
          Tensor<T>& gw = t.grad_buffer(wid);
          gemm(Trans::kYes, Trans::kNo, fout, fin, batch, g.data(), t.value(xid).data(),
               gw.data(), true);
        }
        if (t.requires_grad(bid)) {
          Tensor<T>& gb = t.grad_buffer(bid);
          for (int n = 0; n < batch; ++n) {
            for (int o = 0; o < fout; ++o) gb[o] += g[static_cast<std::size_t>(n) * fout + o];
          }
        }
      });
}

template <typename T>
Var<T> softmax(Var<T> x) {
  const Shape s = x.shape();
  const std::size_t k = s.per_sample();
  Tensor<T> out(s);
  const Tensor<T>& xv = x.value();
  for (int n = 0; n < s.n; ++n) {
    const T* src = xv.sample(n);
    T* dst = out.sample(n);
    T mx = src[0];
    for (std::size_t i = 1; i < k; ++i) mx = src[i] > mx ? src[i] : mx;
    T total(0);
    for (std::size_t i = 0; i < k; ++i) {
      dst[i] = exp_s(src[i] - mx);
      total += dst[i];
    }
    for (std::size_t i = 0; i < k; ++i) dst[i] /= total;
  }
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, s, k](Tape<T>& t, const Tensor<T>& y, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           for (int n = 0; n < s.n; ++n) {
                             const T* yy = y.sample(n);
                             const T* gg = g.sample(n);
                             T dot(0);
                             for (std::size_t i = 0; i < k; ++i) dot += gg[i] * yy[i];
                             T* dst = gx.sample(n);
                             for (std::size_t i = 0; i < k; ++i) dst[i] += yy[i] * (gg[i] - dot);
                           }
                         });
}

template <typename T>
Var<T> log_softmax(Var<T> x) {
  const Shape s = x.shape();
  const std::size_t k = s.per_sample();
  Tensor<T> out(s);
  const Tensor<T>& xv = x.value();
  for (int n = 0; n < s.n; ++n) {
    const T* src = xv.sample(n);
    T* dst = out.sample(n);
    T mx = src[0];
    for (std::size_t i = 1; i < k; ++i) mx = src[i] > mx ? src[i] : mx;
    T total(0);
    for (std::size_t i = 0; i < k; ++i) total += exp_s(src[i] - mx);
    const T lse = mx + log_s(total);
    for (std::size_t i = 0; i < k; ++i) dst[i] = src[i] - lse;
  }
  const int xid = x.id();
  return x.tape().record(std::move(out), x.requires_grad(),
                         [xid, s, k](Tape<T>& t, const Tensor<T>& y, const Tensor<T>& g) {
                           Tensor<T>& gx = t.grad_buffer(xid);
                           for (int n = 0; n < s.n; ++n) {
                             const T* yy = y.sample(n);
                             const T* gg = g.sample(n);
                             T total(0);
                             for (std::size_t i = 0; i < k; ++i) total += gg[i];
                             T* dst = gx.sample(n);
                             for (std::size_t i = 0; i < k; ++i) dst[i] += gg[i] - exp_s(yy[i]) * total;
                           }
                         });
}

template <typename T>
Var<T> broadcast_spatial(Var<T> z, int h, int w) {
  const Shape s = z.shape();
  if (s.h != 1 || s.w != 1) fail("broadcast_spatial", "expected (N,Z,1,1), got " + s.str());
  if (h < 1 || w < 1) fail("broadcast_spatial", "target extent must be positive");
  const Shape os{s.n, s.c, h, w};
  Tensor<T> out(os);
  const std::size_t m = os.plane();
  for (std::size_t g = 0; g < s.size(); ++g) {
    std::fill(out.data() + g * m, out.data() + (g + 1) * m, z.value()[g]);
  }
  const int zid = z.id();
  return z.tape().record(std::move(out), z.requires_grad(),
                         [zid, m](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                           Tensor<T>& gz = t.grad_buffer(zid);
                           for (std::size_t k = 0; k < gz.size(); ++k) {
                             T acc(0);
                             for (std::size_t i = 0; i < m; ++i) acc += g[k * m + i];
                             gz[k] += acc;
                           }
                         });
}

template <typename T>
Var<T> sum(Var<T> x) {
  T acc(0);
  for (const T& v : x.value().values()) acc += v;
  const int xid = x.id();
  return scalar_result<T>(x.tape(), acc, x.requires_grad(),
                          [xid](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                            Tensor<T>& gx = t.grad_buffer(xid);
                            for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[0];
                          });
}

template <typename T>
Var<T> mean(Var<T> x) {
  const std::size_t count = x.value().size();
  if (count == 0) fail("mean", "empty tensor");
  const T inv = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(count));
  T acc(0);
  for (const T& v : x.value().values()) acc += v;
  const int xid = x.id();
  return scalar_result<T>(x.tape(), acc * inv, x.requires_grad(),
                          [xid, inv](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                            Tensor<T>& gx = t.grad_buffer(xid);
                            const T v = g[0] * inv;
                            for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += v;
                          });
}

template <typename T>
Var<T> mean_abs_diff(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape("mean_abs_diff", a, b);
  require_same_shape("mean_abs_diff", a, b);
  const std::size_t count = a.value().size();
  if (count == 0) fail("mean_abs_diff", "empty tensors");
  const T inv = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(count));
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  T acc(0);
  for (std::size_t i = 0; i < count; ++i) {
    const T d = av[i] - bv[i];
    acc += d < T(0) ? -d : d;
  }
  const int aid = a.id();
  const int bid = b.id();
  return scalar_result<T>(
      tape, acc * inv, a.requires_grad() || b.requires_grad(),
      [aid, bid, inv](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
        const Tensor<T>& av = t.value(aid);
        const Tensor<T>& bv = t.value(bid);
        const T v = g[0] * inv;
        Tensor<T>* ga = t.requires_grad(aid) ? &t.grad_buffer(aid) : nullptr;
        Tensor<T>* gb = t.requires_grad(bid) ? &t.grad_buffer(bid) : nullptr;
        for (std::size_t i = 0; i < av.size(); ++i) {
          const T d = av[i] - bv[i];
          const T sgn = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
          if (ga != nullptr) (*ga)[i] += v * sgn;
          if (gb != nullptr) (*gb)[i] -= v * sgn;
        }
      });
}

template <typename T>
Var<T> minmax_normalize(Var<T> x) {
  const Shape s = x.shape();
  const std::size_t m = s.plane();
  const std::size_t groups = static_cast<std::size_t>(s.n) * s.c;
  const T min_range = T(static_cast<real_of_t<T>>(1e-6));
  Tensor<T> out(s);
  std::vector<std::size_t> arg_min(groups), arg_max(groups);
  std::vector<T> range(groups);
  const Tensor<T>& xv = x.value();
  for (std::size_t g = 0; g < groups; ++g) {
    const T* src = xv.data() + g * m;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (src[i] < src[lo]) lo = i;
      if (src[i] > src[hi]) hi = i;
    }
    const T r = src[hi] - src[lo];
    arg_min[g] = lo;
    arg_max[g] = hi;
    range[g] = r;
    T* dst = out.data() + g * m;
    if (r < min_range) {
      std::fill(dst, dst + m, T(real_of_t<T>(0.5)));
    } else {
      for (std::size_t i = 0; i < m; ++i) dst[i] = (src[i] - src[lo]) / r;
    }
  }
  const int xid = x.id();
  return x.tape().record(
      std::move(out), x.requires_grad(),
      [=, arg_min = std::move(arg_min), arg_max = std::move(arg_max),
       range = std::move(range)](Tape<T>& t, const Tensor<T>& y, const Tensor<T>& gout) {
        Tensor<T>& gx = t.grad_buffer(xid);
        for (std::size_t g = 0; g < groups; ++g) {
          if (range[g] < min_range) continue;
          const T* yy = y.data() + g * m;
          const T* go = gout.data() + g * m;
          T* dst = gx.data() + g * m;
          T d_min(0);
          T d_max(0);
          for (std::size_t i = 0; i < m; ++i) {
            dst[i] += go[i] / range[g];
            d_min += go[i] * (yy[i] - T(1));
            d_max -= go[i] * yy[i];
          }
          dst[arg_min[g]] += d_min / range[g];
          dst[arg_max[g]] += d_max / range[g];
        }
      });
}

template <typename T>
Var<T> focal_loss(Var<T> logits, std::span<const int> labels, double gamma) {
  const Shape s = logits.shape();
  const int k = static_cast<int>(s.per_sample());
  if (static_cast<int>(labels.size()) != s.n) {
    fail("focal_loss", "expected " + std::to_string(s.n) + " labels, got " +
                           std::to_string(labels.size()));
  }
  if (gamma < 0) fail("focal_loss", "gamma must be >= 0");
  for (int label : labels) {
    if (label < 0 || label >= k) {
      fail("focal_loss", "label " + std::to_string(label) + " outside [0, " + std::to_string(k) +
                             ")");
    }
  }
  const Tensor<T>& xv = logits.value();
  std::vector<T> probs(s.size());
  T total(0);
  for (int n = 0; n < s.n; ++n) {
    const T* src = xv.sample(n);
    T* p = probs.data() + static_cast<std::size_t>(n) * k;
    T mx = src[0];
    for (int i = 1; i < k; ++i) mx = src[i] > mx ? src[i] : mx;
    T z(0);
    for (int i = 0; i < k; ++i) {
      p[i] = exp_s(src[i] - mx);
      z += p[i];
    }
    for (int i = 0; i < k; ++i) p[i] /= z;
    const int label = labels[static_cast<std::size_t>(n)];
    const T log_pt = src[label] - mx - log_s(z);
    const T pt = p[label];
    total += -pow_s(T(1) - pt, gamma) * log_pt;
  }
  const T inv_n = T(real_of_t<T>(1) / static_cast<real_of_t<T>>(s.n));
  const int xid = logits.id();
  std::vector<int> lab(labels.begin(), labels.end());
  return scalar_result<T>(
      logits.tape(), total * inv_n, logits.requires_grad(),
      [=, probs = std::move(probs)](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
        Tensor<T>& gx = t.grad_buffer(xid);
        const T tg = T(static_cast<real_of_t<T>>(gamma));
        for (int n = 0; n < s.n; ++n) {
          const T* p = probs.data() + static_cast<std::size_t>(n) * k;
          const int label = lab[static_cast<std::size_t>(n)];
          const T pt = p[label];
          const T q = T(1) - pt;
          // d loss / d logit_j = (gamma q^(gamma-1) p log p - q^gamma) (delta_tj - p_j)
          T first(0);
          if (gamma != 0.0 && q > T(0)) first = tg * pow_s(q, gamma - 1.0) * pt * log_s(pt);
          const T coeff = (first - pow_s(q, gamma)) * g[0] * inv_n;
          T* dst = gx.sample(n);
          for (int j = 0; j < k; ++j) {
            const T delta = j == label ? T(1) : T(0);
            dst[j] += coeff * (delta - p[j]);
          }
        }
      });
}

template <typename T>
Var<T> detach(Var<T> x) {
  return x.tape().constant(x.value());
}

#define SKETCHYGAN_INSTANTIATE_OPS(T)                                                           \
  template Var<T> add(Var<T>, Var<T>);                                                         \
  template Var<T> sub(Var<T>, Var<T>);                                                         \
  template Var<T> mul(Var<T>, Var<T>);                                                         \
  template Var<T> affine(Var<T>, double, double);                                              \
  template Var<T> sigmoid(Var<T>);                                                             \
  template Var<T> tanh(Var<T>);                                                                \
  template Var<T> leaky_relu(Var<T>, double);                                                  \
  template Var<T> softplus(Var<T>);                                                            \
  template Var<T> abs(Var<T>);                                                                 \
  template Var<T> clamp_max(Var<T>, double);                                                   \
  template Var<T> conv2d(Var<T>, Var<T>, int, int);                                            \
  template Var<T> conv2d(Var<T>, Var<T>, Var<T>, int, int);                                    \
  template Var<T> concat_channels(Var<T>, Var<T>);                                             \
  template Var<T> concat_channels(std::span<const Var<T>>);                                    \
  template Var<T> concat_batch(Var<T>, Var<T>);                                                \
  template Var<T> slice_batch(Var<T>, int, int);                                               \
  template Var<T> downsample_avg(Var<T>, int);                                                 \
  template Var<T> upsample_nearest(Var<T>, int);                                               \
  template Var<T> cond_instance_norm(Var<T>, std::span<const int>, Var<T>, Var<T>, double);    \
  template Var<T> global_avg_pool(Var<T>);                                                     \
  template Var<T> flatten(Var<T>);                                                             \
  template Var<T> dense(Var<T>, Var<T>, Var<T>);                                               \
  template Var<T> softmax(Var<T>);                                                             \
  template Var<T> log_softmax(Var<T>);                                                         \
  template Var<T> broadcast_spatial(Var<T>, int, int);                                         \
  template Var<T> sum(Var<T>);                                                                 \
  template Var<T> mean(Var<T>);                                                                \
  template Var<T> mean_abs_diff(Var<T>, Var<T>);                                               \
  template Var<T> minmax_normalize(Var<T>);                                                    \
  template Var<T> focal_loss(Var<T>, std::span<const int>, double);                            \
  template Var<T> detach(Var<T>);

SKETCHYGAN_INSTANTIATE_OPS(float)
SKETCHYGAN_INSTANTIATE_OPS(double)
SKETCHYGAN_INSTANTIATE_OPS(Dual<float>)
SKETCHYGAN_INSTANTIATE_OPS(Dual<double>)
#undef SKETCHYGAN_INSTANTIATE_OPS

}  // namespace sketchygan
