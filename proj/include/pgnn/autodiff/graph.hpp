#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "pgnn/autodiff/parameters.hpp"
#include "pgnn/autodiff/tensor.hpp"

namespace pgnn::ad {

class Graph;

struct Node {
  Tensor value;
  std::vector<double> grad;  // allocated lazily on first accumulation
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
  Parameter* param = nullptr;
  bool requires_grad = false;
  std::size_t id = 0;
  Graph* graph = nullptr;

  std::vector<double>& grad_buffer();
};

/// Handle to a node of a Graph. Cheap to copy.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }
  std::size_t id() const { return node_->id; }
  Graph& graph() const { return *node_->graph; }

  // d(loss)/d(this) after Graph::backward; zeros if nothing flowed here.
  Tensor grad() const;

  Node& node() const { return *node_; }
  const std::shared_ptr<Node>& ptr() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

/// Tape of recorded operations in creation (= topological) order.
///
/// A graph built with record=false keeps nothing: intermediate values are
/// released as soon as their last Var goes away, which is what inference on
/// long chains needs.
class Graph {
 public:
  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Differentiable leaf not tied to a parameter (used by gradient checks).
  Var input(Tensor value);
  // Leaf whose gradient is added into p.grad by backward(). Frozen
  // parameters enter as constants.
  Var parameter(Parameter& p);

  void backward(const Var& loss);

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Creates the result node of an operation. backward_fn is dropped when
  // no input requires a gradient or the graph is not recording.
  Var record(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn);

 private:
  Var leaf(Tensor value, bool requires_grad, Parameter* p);

  std::vector<std::shared_ptr<Node>> nodes_;
  std::size_t next_id_ = 0;
  bool record_;
  bool consumed_ = false;
};

}  // namespace pgnn::ad
