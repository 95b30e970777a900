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
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sketchygan/core/tape.hpp"

namespace sketchygan {

/// Named tensors in insertion order. Names are unique.
template <typename T>
class ParamSet {
 public:
  void add(const std::string& name, Tensor<T> value) {
    if (index_.count(name) != 0) throw std::invalid_argument("ParamSet: duplicate name " + name);
    index_.emplace(name, entries_.size());
    entries_.emplace_back(name, std::move(value));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Tensor<T>& at(const std::string& name) { return entries_[locate(name)].second; }
  const Tensor<T>& at(const std::string& name) const { return entries_[locate(name)].second; }

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_.at(i).first; }
  Tensor<T>& tensor(std::size_t i) { return entries_.at(i).second; }
  const Tensor<T>& tensor(std::size_t i) const { return entries_.at(i).second; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  /// Total number of scalars.
  std::size_t count() const {
    std::size_t total = 0;
    for (const auto& e : entries_) total += e.second.size();
    return total;
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& e : entries_) out.add(e.first, e.second.template cast<U>());
    return out;
  }

  /// Same names and shapes, every element set to `value`.
  ParamSet filled_like(T value) const {
    ParamSet out;
    for (const auto& e : entries_) out.add(e.first, Tensor<T>(e.second.shape(), value));
    return out;
  }

  bool same_layout(const ParamSet& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (entries_[i].first != other.entries_[i].first) return false;
      if (entries_[i].second.shape() != other.entries_[i].second.shape()) return false;
    }
    return true;
  }

  bool operator==(const ParamSet& other) const { return entries_ == other.entries_; }

 private:
  std::size_t locate(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("ParamSet: no parameter named " + name);
    return it->second;
  }

  std::vector<std::pair<std::string, Tensor<T>>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/*
 * A ParamSet placed on a tape. Each parameter becomes a leaf Var the first
 * time it is requested, so unused parameters cost nothing and get a zero
 * gradient.
 */
template <typename T>
class Bound {
 public:
  Bound(Tape<T>& tape, const ParamSet<T>& params, bool trainable)
      : tape_(&tape), params_(&params), trainable_(trainable) {}

  Var<T> operator()(const std::string& name) {
    const auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    const Tensor<T>& value = params_->at(name);
    Var<T> v = trainable_ ? tape_->variable(value) : tape_->constant(value);
    vars_.emplace(name, v);
    return v;
  }

  /// Uses an existing leaf for name instead of creating one (gradient checks).
  void bind(const std::string& name, Var<T> v) {
    if (!params_->contains(name)) throw std::invalid_argument("Bound: unknown parameter '" + name + "'");
    if (v.shape() != params_->at(name).shape()) {
      throw std::invalid_argument("Bound: shape mismatch for '" + name + "'");
    }
    vars_.insert_or_assign(name, v);
  }

  bool contains(const std::string& name) const { return params_->contains(name); }
  Tape<T>& tape() const { return *tape_; }
  const ParamSet<T>& params() const { return *params_; }

  /// Gradients after backward, laid out like the bound parameters.
  ParamSet<T> gradients() const {
    ParamSet<T> out;
    for (std::size_t i = 0; i < params_->size(); ++i) {
      const std::string& name = params_->name(i);
      const auto it = vars_.find(name);
      if (it != vars_.end() && !it->second.grad().empty()) {
        out.add(name, it->second.grad());
      } else {
        out.add(name, Tensor<T>(params_->tensor(i).shape()));
      }
    }
    return out;
  }

 private:
  Tape<T>* tape_;
  const ParamSet<T>* params_;
  bool trainable_;
  std::unordered_map<std::string, Var<T>> vars_;
};

/// Uniform in [-b, b] with b = gain * sqrt(3 / fan_in), so the variance is gain^2 / fan_in.
template <typename T>
Tensor<T> fan_in_uniform(Shape shape, int fan_in, double gain, std::mt19937_64& rng) {
  if (fan_in <= 0) throw std::invalid_argument("fan_in_uniform: fan_in must be positive");
  const double bound = gain * std::sqrt(3.0 / fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor<T> out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scalar_cast<T>(static_cast<real_of_t<T>>(dist(rng)));
  }
  return out;
}

/// a += s * b over matching layouts.
template <typename T>
void axpy(ParamSet<T>& a, double s, const ParamSet<T>& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("axpy: parameter layouts differ");
  const T ts = scalar_cast<T>(static_cast<real_of_t<T>>(s));
  for (std::size_t i = 0; i < a.size(); ++i) {
    Tensor<T>& x = a.tensor(i);
    const Tensor<T>& y = b.tensor(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += ts * y[j];
  }
}

}  // namespace sketchygan
