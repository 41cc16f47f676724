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

#include "protohg/autodiff.hpp"

namespace protohg {

Parameter& ParameterSet::create(const std::string& name, Tensor init) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  index_[name] = storage_.size();
  auto& p = storage_.emplace_back();
  p.name = name;
  p.value = std::move(init);
  p.zero_grad();
  return p;
}

Parameter& ParameterSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return storage_[it->second];
}

const Parameter& ParameterSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return storage_[it->second];
}

std::vector<Parameter*> ParameterSet::all() {
  std::vector<Parameter*> out;
  for (auto& p : storage_) out.push_back(&p);
  return out;
}

std::vector<const Parameter*> ParameterSet::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : storage_) out.push_back(&p);
  return out;
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& p : storage_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : storage_) p.grad.fill(0.0);
}

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  auto& n = nodes_.emplace_back();
  n.value = std::move(value);
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var{this, it->second};
  auto& n = nodes_.emplace_back();
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_[&p] = id;
  return Var{this, id};
}

Var Tape::push(Tensor value, std::vector<Var> inputs, Pullback pullback) {
  bool needs = false;
  for (const auto& in : inputs) needs = needs || nodes_[in.id].requires_grad;
  auto& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs) n.pullback = std::move(pullback);
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Tensor& Tape::grad_buffer(const Var& v) {
  auto& n = nodes_[v.id];
  if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape()) {
    n.grad = Tensor::zeros(n.value.shape());
  }
  return n.grad;
}

void Tape::accumulate(const Var& v, const Tensor& g) {
  if (!nodes_[v.id].requires_grad) return;
  grad_buffer(v) += g;
}

const Tensor* Tape::grad(const Var& v) const {
  const auto& n = nodes_[v.id];
  return n.grad.size() == n.value.size() && n.value.size() > 0 ? &n.grad : nullptr;
}

void Tape::backward(const Var& root) {
  backward(root, Tensor(value(root).shape(), 1.0));
}

void Tape::backward(const Var& root, const Tensor& seed) {
  if (seed.shape() != value(root).shape()) {
    throw ShapeError("backward seed shape " + shape_str(seed.shape()) + " vs root " +
                     shape_str(value(root).shape()));
  }
  accumulate(root, seed);
  for (int id = root.id; id >= 0; --id) {
    auto& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.pullback) {
      n.pullback(*this, n.grad);
    } else if (n.param) {
      n.param->grad += n.grad;
    }
  }
}

}  // namespace protohg
