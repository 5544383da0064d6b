#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctm/rng.hpp"
#include "ctm/tensor.hpp"

namespace ctm {

// Differentiable operations. Matrices are rank 2, vectors rank 1, scalars
// rank 0. Every op throws DimensionError on incompatible shapes and
// NumericError if it would produce a non-finite value.

/// [m x k] . [k x n] -> [m x n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose(const Tensor<T>& x);

/// Row-wise softmax, stabilized by subtracting each row's max. A vector is
/// treated as a single row.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

template <typename T>
Tensor<T> abs(const Tensor<T>& x);

/// Column-wise max over the rows of [m x l], giving [l]. Backward routes each
/// column's gradient to its first maximal row.
template <typename T>
Tensor<T> max_pool_rows(const Tensor<T>& x);

/// Inverted dropout. Identity (the same handle) when !training or rate == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, RngState& rng, bool training);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
/// Elementwise product.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);
/// 1 - x, elementwise.
template <typename T>
Tensor<T> one_minus(const Tensor<T>& x);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);
/// Scalar sum of a list of scalars.
template <typename T>
Tensor<T> add_n(const std::vector<Tensor<T>>& xs);
template <typename T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b);
/// Differentiable cosine similarity of two vectors; zero norm is a NumericError.
template <typename T>
Tensor<T> cosine(const Tensor<T>& u, const Tensor<T>& v);
/// log(sum(exp(x))) over a vector, max-shifted.
template <typename T>
Tensor<T> logsumexp(const Tensor<T>& x);
/// Element i of a vector as a scalar.
template <typename T>
Tensor<T> pick(const Tensor<T>& x, std::size_t i);

/// Concatenation of vectors.
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs);
/// Row concatenation of matrices with equal column counts.
template <typename T>
Tensor<T> vstack(const std::vector<Tensor<T>>& xs);
/// Column concatenation of matrices with equal row counts.
template <typename T>
Tensor<T> hstack(const std::vector<Tensor<T>>& xs);
/// Vectors of equal length as the rows of a matrix.
template <typename T>
Tensor<T> stack_rows(const std::vector<Tensor<T>>& xs);
template <typename T>
Tensor<T> reshape(const Tensor<T>& x, const Shape& shape);
template <typename T>
Tensor<T> flatten(const Tensor<T>& x);

/// Rows of a [V x l] table selected by ids, giving [m x l].
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::size_t> ids);
/// Leading rows [0, n) of a matrix.
template <typename T>
Tensor<T> head_rows(const Tensor<T>& x, std::size_t n);

/// Plain value of a cosine; throws NumericError on zero norm.
template <typename T>
T cosine_value(std::span<const T> u, std::span<const T> v);

template <typename T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) { return add(a, b); }
template <typename T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) { return sub(a, b); }

}  // namespace ctm
