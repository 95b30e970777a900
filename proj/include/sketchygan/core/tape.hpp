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

#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "sketchygan/core/tensor.hpp"

namespace sketchygan {

template <typename T>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, int id) : tape_(tape), id_(id) {}

  Tape<T>& tape() const { return *tape_; }
  Tape<T>* tape_ptr() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr && id_ >= 0; }

  const Tensor<T>& value() const { return tape_->value(id_); }
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const { return tape_->requires_grad(id_); }
  /// Accumulated gradient; empty when backward never reached this value.
  const Tensor<T>& grad() const { return tape_->grad(id_); }

 private:
  Tape<T>* tape_ = nullptr;
  int id_ = -1;
};

/*
 * Ordered record of executed differentiable operations. Each entry keeps its
 * output value and, when any input needs a gradient, a closure that maps the
 * output gradient to input gradients. backward() walks the entries once, in
 * reverse execution order.
 *
 * A tape is single-owner: one training step builds and consumes one tape.
 */
template <typename T>
class Tape {
 public:
  using Backward =
      std::function<void(Tape&, const Tensor<T>& out, const Tensor<T>& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> constant(Tensor<T> value) { return push(std::move(value), false, nullptr); }
  Var<T> variable(Tensor<T> value) { return push(std::move(value), true, nullptr); }

  /// Records an op output. The closure is dropped when no input requires grad.
  Var<T> record(Tensor<T> value, bool requires_grad, Backward backward) {
    return push(std::move(value), requires_grad, requires_grad ? std::move(backward) : nullptr);
  }

  const Tensor<T>& value(int id) const { return nodes_.at(static_cast<std::size_t>(id)).value; }
  const Tensor<T>& grad(int id) const { return nodes_.at(static_cast<std::size_t>(id)).grad; }
  bool requires_grad(int id) const {
    return nodes_.at(static_cast<std::size_t>(id)).requires_grad;
  }
  std::size_t size() const { return nodes_.size(); }

  /// Zero-initialized gradient buffer of node `id`, allocated on first use.
  Tensor<T>& grad_buffer(int id) {
    Node& node = nodes_.at(static_cast<std::size_t>(id));
    if (node.grad.empty() && node.value.size() > 0) node.grad = Tensor<T>(node.value.shape());
    return node.grad;
  }

  void accumulate(int id, const Tensor<T>& g) {
    Node& node = nodes_.at(static_cast<std::size_t>(id));
    if (!node.requires_grad) return;
    if (g.shape() != node.value.shape()) {
      throw std::logic_error("Tape::accumulate: gradient shape " + g.shape().str() +
                             " does not match value shape " + node.value.shape().str());
    }
    if (node.grad.empty()) {
      node.grad = g;
      return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) node.grad[i] += g[i];
  }

  /// Backpropagates from a scalar root, seeding d(root)/d(root) = 1.
  void backward(Var<T> root) {
    check_owner(root);
    if (root.value().size() != 1) {
      throw std::invalid_argument("Tape::backward: root must be a scalar, got shape " +
                                  root.shape().str());
    }
    backward(root, Tensor<T>(root.shape(), T(1)));
  }

  /// Backpropagates an explicit seed gradient (same shape as root).
  void backward(Var<T> root, const Tensor<T>& seed) {
    check_owner(root);
    accumulate(root.id(), seed);
    for (int i = root.id(); i >= 0; --i) {
      Node& node = nodes_[static_cast<std::size_t>(i)];
      if (!node.requires_grad || !node.backward || node.grad.empty()) continue;
      node.backward(*this, node.value, node.grad);
      ++visited_;
    }
  }

  /// Number of op closures executed by backward passes so far.
  std::size_t backward_visits() const { return visited_; }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var<T> push(Tensor<T> value, bool requires_grad, Backward backward) {
    nodes_.push_back(Node{std::move(value), Tensor<T>(), requires_grad, std::move(backward)});
    return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
  }

  void check_owner(const Var<T>& v) const {
    if (v.tape_ptr() != this) throw std::invalid_argument("Tape: variable belongs to another tape");
  }

  std::deque<Node> nodes_;
  std::size_t visited_ = 0;
};

}  // namespace sketchygan
