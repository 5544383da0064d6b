#include "ctm/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctm/errors.hpp"

namespace ctm {

using detail::make_result;
using detail::pass_grad;

namespace {

template <typename T>
void require_rank(const Tensor<T>& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + to_string(x.shape()));
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
  }
}

template <typename T>
void require_finite(const Tensor<T>& x, const char* op) {
  for (T v : x.data()) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite input");
  }
}

template <typename T>
bool wants_grad(const Node<T>& n) {
  return n.requires_grad;
}

// Elementwise unary op with derivative expressed through input x and output y.
template <typename T, typename F, typename D>
Tensor<T> unary(const char* op, const Tensor<T>& x, F f, D dfdx) {
  std::vector<T> out(x.size());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result<T>(op, x.shape(), std::move(out), {x}, [dfdx](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& ga = pass_grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) {
      ga[i] += self.pass_grad[i] * dfdx(a.value[i], self.value[i]);
    }
  });
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ, " + to_string(a.shape()) + " . " +
                         to_string(b.shape()));
  }
  std::vector<T> out(m * n, T(0));
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = A[i * k + p];
      const T* brow = &B[p * n];
      T* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result<T>("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    Node<T>& na = *self.inputs[0];
    Node<T>& nb = *self.inputs[1];
    const auto& G = self.pass_grad;
    if (wants_grad(na)) {
      auto& ga = pass_grad(na);
      // dA = G . B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += G[i * n + j] * nb.value[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (wants_grad(nb)) {
      auto& gb = pass_grad(nb);
      // dB = A^T . G
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const T aip = na.value[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * G[i * n + j];
        }
      }
    }
  });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x) {
  require_rank(x, 2, "transpose");
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<T> out(m * n);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = in[i * n + j];
  return make_result<T>("transpose", {n, m}, std::move(out), {x}, [m, n](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& ga = pass_grad(a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += self.pass_grad[j * m + i];
  });
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x) {
  if (x.rank() != 1 && x.rank() != 2) {
    throw DimensionError("softmax_rows: expected a vector or matrix, got " + to_string(x.shape()));
  }
  require_finite(x, "softmax_rows");
  const std::size_t n = x.shape().back();
  const std::size_t m = x.size() / n;
  std::vector<T> out(x.size());
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    const T* row = &in[i * n];
    T* orow = &out[i * n];
    const T mx = *std::max_element(row, row + n);
    T total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      orow[j] = std::exp(row[j] - mx);
      total += orow[j];
    }
    for (std::size_t j = 0; j < n; ++j) orow[j] /= total;
  }
  return make_result<T>("softmax_rows", x.shape(), std::move(out), {x}, [m, n](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& ga = pass_grad(a);
    const auto& y = self.value;
    const auto& g = self.pass_grad;
    for (std::size_t i = 0; i < m; ++i) {
      T inner = 0;
      for (std::size_t j = 0; j < n; ++j) inner += g[i * n + j] * y[i * n + j];
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += y[i * n + j] * (g[i * n + j] - inner);
    }
  });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return unary<T>(
      "relu", x, [](T v) { return v > T(0) ? v : T(0); },
      [](T v, T) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return unary<T>(
      "sigmoid", x,
      [](T v) {
        if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& x) {
  return unary<T>(
      "abs", x, [](T v) { return std::abs(v); },
      [](T v, T) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> max_pool_rows(const Tensor<T>& x) {
  require_rank(x, 2, "max_pool_rows");
  const std::size_t m = x.rows(), l = x.cols();
  std::vector<T> out(l);
  std::vector<std::size_t> arg(l, 0);
  auto in = x.data();
  for (std::size_t j = 0; j < l; ++j) {
    out[j] = in[j];
    for (std::size_t i = 1; i < m; ++i) {
      if (in[i * l + j] > out[j]) {
        out[j] = in[i * l + j];
        arg[j] = i;
      }
    }
  }
  return make_result<T>("max_pool_rows", {l}, std::move(out), {x},
                        [l, arg = std::move(arg)](Node<T>& self) {
                          Node<T>& a = *self.inputs[0];
                          if (!wants_grad(a)) return;
                          auto& ga = pass_grad(a);
                          for (std::size_t j = 0; j < l; ++j) ga[arg[j] * l + j] += self.pass_grad[j];
                        });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, RngState& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const T keep_scale = T(1) / static_cast<T>(1.0 - rate);
  std::vector<T> mask(x.size());
  for (auto& m : mask) m = rng.uniform() < rate ? T(0) : keep_scale;
  std::vector<T> out(x.size());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] * mask[i];
  return make_result<T>("dropout", x.shape(), std::move(out), {x},
                        [mask = std::move(mask)](Node<T>& self) {
                          Node<T>& a = *self.inputs[0];
                          if (!wants_grad(a)) return;
                          auto& ga = pass_grad(a);
                          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.pass_grad[i] * mask[i];
                        });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result<T>("add", a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    for (auto& in : self.inputs) {
      if (!wants_grad(*in)) continue;
      auto& g = pass_grad(*in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.pass_grad[i];
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return make_result<T>("sub", a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    if (wants_grad(*self.inputs[0])) {
      auto& g = pass_grad(*self.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.pass_grad[i];
    }
    if (wants_grad(*self.inputs[1])) {
      auto& g = pass_grad(*self.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.pass_grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result<T>("mul", a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    Node<T>& na = *self.inputs[0];
    Node<T>& nb = *self.inputs[1];
    if (wants_grad(na)) {
      auto& g = pass_grad(na);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.pass_grad[i] * nb.value[i];
    }
    if (wants_grad(nb)) {
      auto& g = pass_grad(nb);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.pass_grad[i] * na.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  return unary<T>(
      "scale", x, [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> one_minus(const Tensor<T>& x) {
  return unary<T>(
      "one_minus", x, [](T v) { return T(1) - v; }, [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = 0;
  for (T v : x.data()) total += v;
  return make_result<T>("sum", {}, {total}, {x}, [](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& g = pass_grad(a);
    for (auto& v : g) v += self.pass_grad[0];
  });
}

template <typename T>
Tensor<T> add_n(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw ContractError("add_n: empty list");
  T total = 0;
  for (const auto& x : xs) total += x.item();
  return make_result<T>("add_n", {}, {total}, xs, [](Node<T>& self) {
    for (auto& in : self.inputs) {
      if (!wants_grad(*in)) continue;
      pass_grad(*in)[0] += self.pass_grad[0];
    }
  });
}

template <typename T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 1, "dot");
  require_same_shape(a, b, "dot");
  T total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a.data()[i] * b.data()[i];
  return make_result<T>("dot", {}, {total}, {a, b}, [](Node<T>& self) {
    Node<T>& na = *self.inputs[0];
    Node<T>& nb = *self.inputs[1];
    const T g = self.pass_grad[0];
    if (wants_grad(na)) {
      auto& ga = pass_grad(na);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g * nb.value[i];
    }
    if (wants_grad(nb)) {
      auto& gb = pass_grad(nb);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g * na.value[i];
    }
  });
}

template <typename T>
T cosine_value(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw DimensionError("cosine: length mismatch");
  T uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > T(0)) || !(vv > T(0))) throw NumericError("cosine: zero-norm vector");
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

template <typename T>
Tensor<T> cosine(const Tensor<T>& u, const Tensor<T>& v) {
  require_rank(u, 1, "cosine");
  require_same_shape(u, v, "cosine");
  T uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u.data()[i] * v.data()[i];
    uu += u.data()[i] * u.data()[i];
    vv += v.data()[i] * v.data()[i];
  }
  if (!(uu > T(0)) || !(vv > T(0))) throw NumericError("cosine: zero-norm vector");
  const T nu = std::sqrt(uu), nv = std::sqrt(vv);
  const T c = uv / (nu * nv);
  return make_result<T>("cosine", {}, {c}, {u, v}, [c, nu, nv](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    Node<T>& b = *self.inputs[1];
    const T g = self.pass_grad[0];
    // dc/du = v/(|u||v|) - c u/|u|^2
    if (wants_grad(a)) {
      auto& ga = pass_grad(a);
      for (std::size_t i = 0; i < ga.size(); ++i)
        ga[i] += g * (b.value[i] / (nu * nv) - c * a.value[i] / (nu * nu));
    }
    if (wants_grad(b)) {
      auto& gb = pass_grad(b);
      for (std::size_t i = 0; i < gb.size(); ++i)
        gb[i] += g * (a.value[i] / (nu * nv) - c * b.value[i] / (nv * nv));
    }
  });
}

template <typename T>
Tensor<T> logsumexp(const Tensor<T>& x) {
  require_rank(x, 1, "logsumexp");
  require_finite(x, "logsumexp");
  auto in = x.data();
  const std::size_t top = static_cast<std::size_t>(std::max_element(in.begin(), in.end()) - in.begin());
  const T mx = in[top];
  T rest = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i != top) rest += std::exp(in[i] - mx);
  }
  const T result = mx + std::log1p(rest);
  return make_result<T>("logsumexp", {}, {result}, {x}, [result](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& ga = pass_grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i)
      ga[i] += self.pass_grad[0] * std::exp(a.value[i] - result);
  });
}

template <typename T>
Tensor<T> pick(const Tensor<T>& x, std::size_t i) {
  require_rank(x, 1, "pick");
  if (i >= x.size()) throw DimensionError("pick: index out of range");
  return make_result<T>("pick", {}, {x.data()[i]}, {x}, [i](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    pass_grad(a)[i] += self.pass_grad[0];
  });
}

namespace {

// Shared backward for ops whose output is the inputs' data laid end to end.
template <typename T>
void split_back(Node<T>& self) {
  std::size_t offset = 0;
  for (auto& in : self.inputs) {
    const std::size_t n = in->value.size();
    if (wants_grad(*in)) {
      auto& g = pass_grad(*in);
      for (std::size_t i = 0; i < n; ++i) g[i] += self.pass_grad[offset + i];
    }
    offset += n;
  }
}

}  // namespace

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw DimensionError("concat: no inputs");
  std::vector<T> out;
  for (const auto& x : xs) {
    require_rank(x, 1, "concat");
    out.insert(out.end(), x.data().begin(), x.data().end());
  }
  const std::size_t n = out.size();
  return make_result<T>("concat", {n}, std::move(out), xs, split_back<T>);
}

template <typename T>
Tensor<T> vstack(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw DimensionError("vstack: no inputs");
  const std::size_t l = xs.front().cols();
  std::size_t m = 0;
  std::vector<T> out;
  for (const auto& x : xs) {
    require_rank(x, 2, "vstack");
    if (x.cols() != l) {
      throw DimensionError("vstack: column mismatch " + to_string(xs.front().shape()) + " vs " +
                           to_string(x.shape()));
    }
    m += x.rows();
    out.insert(out.end(), x.data().begin(), x.data().end());
  }
  return make_result<T>("vstack", {m, l}, std::move(out), xs, split_back<T>);
}

template <typename T>
Tensor<T> hstack(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw DimensionError("hstack: no inputs");
  const std::size_t m = xs.front().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& x : xs) {
    require_rank(x, 2, "hstack");
    if (x.rows() != m) {
      throw DimensionError("hstack: row mismatch " + to_string(xs.front().shape()) + " vs " +
                           to_string(x.shape()));
    }
    widths.push_back(x.cols());
    total += x.cols();
  }
  std::vector<T> out(m * total);
  std::size_t col = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto in = xs[k].data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j) out[i * total + col + j] = in[i * widths[k] + j];
    col += widths[k];
  }
  return make_result<T>("hstack", {m, total}, std::move(out), xs,
                        [m, total, widths](Node<T>& self) {
                          std::size_t c = 0;
                          for (std::size_t k = 0; k < self.inputs.size(); ++k) {
                            Node<T>& in = *self.inputs[k];
                            if (wants_grad(in)) {
                              auto& g = pass_grad(in);
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t j = 0; j < widths[k]; ++j)
                                  g[i * widths[k] + j] += self.pass_grad[i * total + c + j];
                            }
                            c += widths[k];
                          }
                        });
}

template <typename T>
Tensor<T> stack_rows(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw DimensionError("stack_rows: no inputs");
  const std::size_t l = xs.front().size();
  std::vector<T> out;
  for (const auto& x : xs) {
    require_rank(x, 1, "stack_rows");
    if (x.size() != l) throw DimensionError("stack_rows: length mismatch");
    out.insert(out.end(), x.data().begin(), x.data().end());
  }
  return make_result<T>("stack_rows", {xs.size(), l}, std::move(out), xs, split_back<T>);
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, const Shape& shape) {
  if (numel(shape) != x.size()) {
    throw DimensionError("reshape: " + to_string(x.shape()) + " -> " + to_string(shape));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return make_result<T>("reshape", shape, std::move(out), {x}, split_back<T>);
}

template <typename T>
Tensor<T> flatten(const Tensor<T>& x) {
  return reshape(x, Shape{x.size()});
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::size_t> ids) {
  require_rank(table, 2, "gather_rows");
  if (ids.empty()) throw DimensionError("gather_rows: no ids");
  const std::size_t l = table.cols(), vocab = table.rows();
  std::vector<T> out(ids.size() * l);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vocab) throw DimensionError("gather_rows: id " + std::to_string(ids[i]) + " out of range");
    std::copy_n(&table.data()[ids[i] * l], l, &out[i * l]);
  }
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  return make_result<T>("gather_rows", {ids.size(), l}, std::move(out), {table},
                        [l, idv = std::move(idv)](Node<T>& self) {
                          Node<T>& a = *self.inputs[0];
                          if (!wants_grad(a)) return;
                          auto& g = pass_grad(a);
                          for (std::size_t i = 0; i < idv.size(); ++i)
                            for (std::size_t j = 0; j < l; ++j) g[idv[i] * l + j] += self.pass_grad[i * l + j];
                        });
}

template <typename T>
Tensor<T> head_rows(const Tensor<T>& x, std::size_t n) {
  require_rank(x, 2, "head_rows");
  if (n == 0 || n > x.rows()) throw DimensionError("head_rows: bad row count");
  if (n == x.rows()) return x;
  const std::size_t l = x.cols();
  std::vector<T> out(x.data().begin(), x.data().begin() + static_cast<std::ptrdiff_t>(n * l));
  return make_result<T>("head_rows", {n, l}, std::move(out), {x}, [](Node<T>& self) {
    Node<T>& a = *self.inputs[0];
    if (!wants_grad(a)) return;
    auto& g = pass_grad(a);
    for (std::size_t i = 0; i < self.pass_grad.size(); ++i) g[i] += self.pass_grad[i];
  });
}

#define CTM_INSTANTIATE_OPS(T)                                                         \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> transpose(const Tensor<T>&);                                      \
  template Tensor<T> softmax_rows(const Tensor<T>&);                                   \
  template Tensor<T> relu(const Tensor<T>&);                                           \
  template Tensor<T> sigmoid(const Tensor<T>&);                                        \
  template Tensor<T> abs(const Tensor<T>&);                                            \
  template Tensor<T> max_pool_rows(const Tensor<T>&);                                  \
  template Tensor<T> dropout(const Tensor<T>&, double, RngState&, bool);               \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> scale(const Tensor<T>&, T);                                       \
  template Tensor<T> one_minus(const Tensor<T>&);                                      \
  template Tensor<T> sum(const Tensor<T>&);                                            \
  template Tensor<T> add_n(const std::vector<Tensor<T>>&);                             \
  template Tensor<T> dot(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> cosine(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> logsumexp(const Tensor<T>&);                                      \
  template Tensor<T> pick(const Tensor<T>&, std::size_t);                              \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                            \
  template Tensor<T> vstack(const std::vector<Tensor<T>>&);                            \
  template Tensor<T> hstack(const std::vector<Tensor<T>>&);                            \
  template Tensor<T> stack_rows(const std::vector<Tensor<T>>&);                        \
  template Tensor<T> reshape(const Tensor<T>&, const Shape&);                          \
  template Tensor<T> flatten(const Tensor<T>&);                                        \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::size_t>);      \
  template Tensor<T> head_rows(const Tensor<T>&, std::size_t);                         \
  template T cosine_value(std::span<const T>, std::span<const T>);

CTM_INSTANTIATE_OPS(float)
CTM_INSTANTIATE_OPS(double)

}  // namespace ctm
