#include "ctm/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

#include "ctm/errors.hpp"

namespace ctm {

namespace {
thread_local bool g_grad_enabled = true;
thread_local const char* g_corrupt_op = nullptr;
std::atomic<std::uint64_t> g_node_counter{1};
}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

namespace testing {
void corrupt_backward(const char* op) { g_corrupt_op = op; }
const char* corrupted_backward_op() { return g_corrupt_op; }
}  // namespace testing

namespace detail {

std::uint64_t next_node_id() { return g_node_counter.fetch_add(1, std::memory_order_relaxed); }

template <typename T>
std::vector<T>& pass_grad(Node<T>& node) {
  if (node.pass_grad.size() != node.value.size()) node.pass_grad.assign(node.value.size(), T(0));
  return node.pass_grad;
}

template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value,
                      std::vector<Tensor<T>> inputs,
                      std::function<void(Node<T>&)> backward_fn) {
  for (const T& v : value) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite result");
  }
  auto node = std::make_shared<Node<T>>();
  node->id = next_node_id();
  node->op = op;
  node->shape = std::move(shape);
  node->value = std::move(value);
  const bool any_grad = std::any_of(inputs.begin(), inputs.end(),
                                    [](const Tensor<T>& t) { return t.requires_grad(); });
  if (g_grad_enabled && any_grad) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& t : inputs) node->inputs.push_back(t.node());
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor<T>::from_node(std::move(node));
}

}  // namespace detail

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad) {
  if (data.size() != numel(shape)) {
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + to_string(shape));
  }
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("zero-sized dimension in shape " + to_string(shape));
  }
  node_ = std::make_shared<Node<T>>();
  node_->id = detail::next_node_id();
  node_->shape = std::move(shape);
  node_->value = std::move(data);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(const Shape& shape, bool requires_grad) {
  return Tensor(shape, std::vector<T>(numel(shape), T(0)), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::filled(const Shape& shape, T value) {
  return Tensor(shape, std::vector<T>(numel(shape), value));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return Tensor(Shape{}, std::vector<T>{value});
}

template <typename T>
Tensor<T> Tensor<T>::from_node(std::shared_ptr<Node<T>> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

template <typename T>
std::size_t Tensor<T>::rows() const {
  if (rank() != 2) throw DimensionError("rows() on tensor of shape " + to_string(shape()));
  return shape()[0];
}

template <typename T>
std::size_t Tensor<T>::cols() const {
  if (rank() != 2) throw DimensionError("cols() on tensor of shape " + to_string(shape()));
  return shape()[1];
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  if (!node_->is_leaf()) throw ContractError("mutable_data() on a non-leaf tensor");
  return node_->value;
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw DimensionError("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::size_t r, std::size_t c) const {
  return node_->value[r * cols() + c];
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  if (node_->grad.size() != node_->value.size()) node_->grad.assign(node_->value.size(), T(0));
  return node_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(shape(), node_->value, false);
}

template <typename T>
Graph<T> Graph<T>::collect(const Tensor<T>& root) {
  Graph g;
  g.root_ = root.node().get();
  std::unordered_set<Node<T>*> seen;
  std::vector<Node<T>*> stack{g.root_};
  while (!stack.empty()) {
    Node<T>* n = stack.back();
    stack.pop_back();
    if (!n->requires_grad || !seen.insert(n).second) continue;
    g.nodes_.push_back(n);
    for (auto& in : n->inputs) stack.push_back(in.get());
  }
  std::sort(g.nodes_.begin(), g.nodes_.end(),
            [](const Node<T>* a, const Node<T>* b) { return a->id < b->id; });
  return g;
}

template <typename T>
void Graph<T>::backward() {
  if (root_ == nullptr || !root_->requires_grad) return;
  for (Node<T>* n : nodes_) n->pass_grad.assign(n->value.size(), T(0));
  root_->pass_grad[0] = T(1);
  const char* corrupt = g_corrupt_op;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node<T>* n = *it;
    if (n->is_leaf() || !n->backward_fn) continue;
    if (corrupt != nullptr && std::strcmp(corrupt, n->op) == 0) {
      for (T& g : n->pass_grad) g *= T(1.5);
    }
    n->backward_fn(*n);
  }
  for (Node<T>* n : nodes_) {
    if (n->is_leaf()) {
      if (n->grad.size() != n->value.size()) n->grad.assign(n->value.size(), T(0));
      for (std::size_t i = 0; i < n->grad.size(); ++i) n->grad[i] += n->pass_grad[i];
    }
    n->pass_grad.clear();
    n->pass_grad.shrink_to_fit();
  }
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  Graph<T>::collect(loss).backward();
}

template class Tensor<float>;
template class Tensor<double>;
template class Graph<float>;
template class Graph<double>;
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);
template Tensor<float> detail::make_result(const char*, Shape, std::vector<float>,
                                           std::vector<Tensor<float>>,
                                           std::function<void(Node<float>&)>);
template Tensor<double> detail::make_result(const char*, Shape, std::vector<double>,
                                            std::vector<Tensor<double>>,
                                            std::function<void(Node<double>&)>);
template std::vector<float>& detail::pass_grad(Node<float>&);
template std::vector<double>& detail::pass_grad(Node<double>&);

}  // namespace ctm
