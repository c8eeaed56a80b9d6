#include "pgnn/autodiff/graph.hpp"

#include "pgnn/errors.hpp"

namespace pgnn::ad {

std::vector<double>& Node::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Var::grad() const {
  if (node_->grad.empty()) return Tensor(shape());
  return Tensor(shape(), node_->grad);
}

Var Graph::leaf(Tensor value, bool requires_grad, Parameter* p) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = requires_grad && record_;
  node->param = p;
  node->id = next_id_++;
  node->graph = this;
  if (node->requires_grad) nodes_.push_back(node);
  return Var(std::move(node));
}

Var Graph::constant(Tensor value) { return leaf(std::move(value), false, nullptr); }

Var Graph::input(Tensor value) { return leaf(std::move(value), true, nullptr); }

Var Graph::parameter(Parameter& p) { return leaf(p.value, !p.frozen, p.frozen ? nullptr : &p); }

Var Graph::record(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->id = next_id_++;
  node->graph = this;
  bool any = false;
  for (const auto& in : inputs) {
    if (in.node().graph != this) throw ContractError("operation mixes nodes of different graphs");
    any = any || in.requires_grad();
  }
  if (record_ && any) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.ptr());
    node->backward = std::move(backward_fn);
    nodes_.push_back(node);
  }
  return Var(std::move(node));
}

void Graph::backward(const Var& loss) {
  if (loss.size() != 1)
    throw ContractError("backward needs a scalar loss, got " + shape_str(loss.shape()));
  if (consumed_) throw ContractError("backward already ran on this graph");
  if (&loss.graph() != this) throw ContractError("loss belongs to a different graph");
  consumed_ = true;
  if (!loss.requires_grad()) return;
  loss.node().grad_buffer()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = **it;
    if (n.grad.empty()) continue;
    if (n.backward) n.backward(n);
    if (n.param) {
      auto& g = n.param->grad;
      if (g.shape() != n.value.shape()) g = Tensor(n.value.shape());
      for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i];
    }
  }
}

}  // namespace pgnn::ad
