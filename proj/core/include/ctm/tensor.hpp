#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ctm {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

// One recorded value in the computation graph. Leaves (parameters and
// constants) have no inputs; every other node owns a backward closure that
// reads its own pass_grad and accumulates into its inputs' pass_grad.
template <typename T>
struct Node {
  std::uint64_t id = 0;
  const char* op = "leaf";
  Shape shape;
  std::vector<T> value;
  bool requires_grad = false;
  std::vector<T> grad;
  std::vector<T> pass_grad;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return inputs.empty(); }
};

// Dense row-major tensor handle. Copies share the underlying node, so a
// parameter can be held by the model and by the optimizer at once.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor filled(const Shape& shape, T value);
  static Tensor scalar(T value);
  static Tensor from_node(std::shared_ptr<Node<T>> node);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const T> data() const { return node_->value; }
  /// Writable view, only for leaves (optimizer updates, initialization).
  std::span<T> mutable_data();
  T item() const;
  T operator[](std::size_t i) const { return node_->value[i]; }
  T at(std::size_t r, std::size_t c) const;

  bool requires_grad() const { return node_->requires_grad; }
  /// Accumulated gradient; empty until the first backward pass reaches it.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad();
  void zero_grad();

  std::uint64_t graph_id() const { return node_->id; }
  const char* op() const { return node_->op; }
  const std::shared_ptr<Node<T>>& node() const { return node_; }

  /// Value copy cut from the graph.
  Tensor detach() const;

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<U>(data()[i]);
    return Tensor<U>(shape(), std::move(out), requires_grad());
  }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Tape view of everything reachable from a root, in creation order. Node ids
// are issued monotonically, so creation order is a topological order.
template <typename T>
class Graph {
 public:
  static Graph collect(const Tensor<T>& root);

  std::span<Node<T>* const> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep seeded with d(root)/d(root) = 1. Parameter gradients are
  /// computed into scratch and then added to the accumulated buffers.
  void backward();

 private:
  Node<T>* root_ = nullptr;
  std::vector<Node<T>*> nodes_;
};

template <typename T>
void backward(const Tensor<T>& loss);

namespace testing {
// Scales the incoming gradient of every node with the given op name by 1.5
// during backward. Pass nullptr to clear. Mutation-test hook only.
void corrupt_backward(const char* op);
const char* corrupted_backward_op();
}  // namespace testing

namespace detail {
std::uint64_t next_node_id();

// Builds a graph node (or a detached value when recording is off) and
// rejects non-finite results.
template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value,
                      std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward_fn);

template <typename T>
std::vector<T>& pass_grad(Node<T>& node);
}  // namespace detail

}  // namespace ctm
