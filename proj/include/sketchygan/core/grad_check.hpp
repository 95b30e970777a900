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
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchygan/core/tape.hpp"

namespace sketchygan {

struct GradCheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  /// Coordinates probed per input; 0 probes every coordinate.
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
  /*
   * Denominator floor: relative error is |a - n| / max(|a|, |n|, floor).
   * Central-difference roundoff is around 1e-10 at eps 1e-5, so gradients
   * that are exactly zero are judged by absolute error tol * floor.
   */
  double floor = 1e-5;
  /*
   * A probe whose one-sided slopes disagree by more than kink_tol (relative)
   * straddles a non-differentiable point (ReLU kink, min/max switch). It is
   * retried with smaller steps and skipped if the asymmetry persists.
   */
  double kink_tol = 1e-2;
  /// Step reductions (x0.1 each) tried on a probe that looks kinked or fails.
  int refinements = 2;
  /// The check fails if more than this fraction of all probes are skipped.
  double max_skip_fraction = 0.05;
};

struct GradCheckInputReport {
  double max_rel_error = 0.0;
  std::size_t probed = 0;
  std::size_t skipped_kinks = 0;
};

struct GradCheckReport {
  std::vector<GradCheckInputReport> inputs;
  bool passed = true;

  double worst() const {
    double w = 0.0;
    for (const auto& r : inputs) w = std::max(w, r.max_rel_error);
    return w;
  }
  std::size_t probed() const {
    std::size_t n = 0;
    for (const auto& r : inputs) n += r.probed;
    return n;
  }
  std::size_t skipped() const {
    std::size_t n = 0;
    for (const auto& r : inputs) n += r.skipped_kinks;
    return n;
  }
};

/// Builds the scalar under test on a fresh tape from leaf variables.
using GradCheckFn = std::function<Var<double>(Tape<double>&, std::span<const Var<double>>)>;

/*
 * Compares tape gradients of fn against central differences
 * (f(x + eps) - f(x - eps)) / 2 eps, coordinate by coordinate.
 */
inline GradCheckReport grad_check(const GradCheckFn& fn, const std::vector<TensorD>& inputs,
                                  const GradCheckOptions& opt = {}) {
  auto evaluate = [&](const std::vector<TensorD>& xs, bool with_grad,
                      std::vector<TensorD>* grads) {
    Tape<double> tape;
    std::vector<Var<double>> vars;
    vars.reserve(xs.size());
    for (const TensorD& x : xs) vars.push_back(with_grad ? tape.variable(x) : tape.constant(x));
    Var<double> out = fn(tape, vars);
    if (out.value().size() != 1) {
      throw std::invalid_argument("grad_check: function must return a scalar, got shape " +
                                  out.shape().str());
    }
    if (with_grad) {
      tape.backward(out);
      grads->clear();
      for (const Var<double>& v : vars) {
        grads->push_back(v.grad().empty() ? TensorD(v.shape()) : v.grad());
      }
    }
    return out.value()[0];
  };

  std::vector<TensorD> analytic;
  const double f0 = evaluate(inputs, true, &analytic);

  GradCheckReport report;
  std::mt19937_64 rng(opt.seed);
  std::vector<TensorD> work = inputs;

  struct Probe {
    double numeric;
    bool kink;
  };
  auto probe = [&](std::size_t k, std::size_t idx, double eps) {
    const double x = inputs[k][idx];
    work[k][idx] = x + eps;
    const double fp = evaluate(work, false, nullptr);
    work[k][idx] = x - eps;
    const double fm = evaluate(work, false, nullptr);
    work[k][idx] = x;
    const double right = (fp - f0) / eps;
    const double left = (f0 - fm) / eps;
    const double scale = std::max({std::abs(right), std::abs(left), opt.floor});
    return Probe{(fp - fm) / (2.0 * eps), std::abs(right - left) > opt.kink_tol * scale};
  };

  std::size_t total = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    GradCheckInputReport r;
    const std::size_t n = inputs[k].size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (opt.max_coords != 0 && opt.max_coords < n) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opt.max_coords);
    }
    for (std::size_t idx : coords) {
      const double a = analytic[k][idx];
      auto error = [&](double numeric) {
        return std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), opt.floor});
      };
      Probe p = probe(k, idx, opt.eps);
      double err = p.kink ? INFINITY : error(p.numeric);
      // A kink inside [x - eps, x + eps] shows up as asymmetric one-sided
      // slopes; shrink the step until it is excluded or give up on the probe.
      // The smallest error over the un-kinked steps counts.
      for (int refine = 1; refine <= opt.refinements && err > opt.tol; ++refine) {
        const Probe q = probe(k, idx, opt.eps * std::pow(0.1, refine));
        if (q.kink) continue;
        p = q;
        err = std::min(err, error(q.numeric));
      }
      if (p.kink) {
        ++r.skipped_kinks;
        continue;
      }
      r.max_rel_error = std::max(r.max_rel_error, err);
      ++r.probed;
    }
    if (r.max_rel_error > opt.tol) report.passed = false;
    total += r.probed + r.skipped_kinks;
    report.inputs.push_back(r);
  }
  if (total > 0 && static_cast<double>(report.skipped()) > opt.max_skip_fraction * total) {
    report.passed = false;
  }
  return report;
}

}  // namespace sketchygan
