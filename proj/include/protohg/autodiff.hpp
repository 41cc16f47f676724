/*
 * Copyright 2026 The protohg Authors
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

#ifndef PROTOHG_AUTODIFF_HPP_
#define PROTOHG_AUTODIFF_HPP_

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "protohg/tensor.hpp"

namespace protohg {

// A learnable tensor together with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad = Tensor::zeros(value.shape()); }
};

// Owns parameters keyed by module path ("block0.enc.r.theta"). Addresses are
// stable for the lifetime of the set, so layers may hold raw pointers.
class ParameterSet {
 public:
  Parameter& create(const std::string& name, Tensor init);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  // Insertion order, which is also the checkpoint order.
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t count() const;  // total scalar count

  void zero_grad();

 private:
  std::deque<Parameter> storage_;
  std::map<std::string, std::size_t> index_;
};

class Tape;

// Handle to a node on a Tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool valid() const { return tape != nullptr && id >= 0; }
};

// Reverse-mode tape. Nodes are appended during the forward pass; backward()
// walks them in reverse and calls each node's pullback.
class Tape {
 public:
  using Pullback = std::function<void(Tape&, const Tensor& grad_out)>;

  Var constant(Tensor value);
  Var param(Parameter& p);
  Var push(Tensor value, std::vector<Var> inputs, Pullback pullback);

  const Tensor& value(const Var& v) const { return nodes_[v.id].value; }
  bool requires_grad(const Var& v) const { return nodes_[v.id].requires_grad; }

  // Adds g into the gradient slot of v (no-op when v does not need grad).
  void accumulate(const Var& v, const Tensor& g);
  // Direct access to the gradient buffer, allocating zeros when empty.
  Tensor& grad_buffer(const Var& v);
  const Tensor* grad(const Var& v) const;

  // Seeds d(root)/d(root) with ones (or the given seed) and propagates.
  // Parameter gradients are added into Parameter::grad.
  void backward(const Var& root);
  void backward(const Var& root, const Tensor& seed);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    Pullback pullback;
  };

  std::deque<Node> nodes_;
  std::unordered_map<Parameter*, int> param_nodes_;
};

}  // namespace protohg

#endif  // PROTOHG_AUTODIFF_HPP_
