#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ctm/rng.hpp"
#include "ctm/tensor.hpp"

namespace ctm::test {

template <typename T>
Tensor<T> random_tensor(const Shape& shape, RngState& rng, double lo = -1.0, double hi = 1.0,
                        bool requires_grad = false) {
  std::vector<T> data(numel(shape));
  for (auto& v : data) v = static_cast<T>(rng.uniform(lo, hi));
  return Tensor<T>(shape, std::move(data), requires_grad);
}

template <typename T>
double max_abs_diff(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return worst;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) return INFINITY;
  return max_abs_diff<T>(a.data(), b.data());
}

// Plain row-major matrices for loop oracles.
using Mat = std::vector<std::vector<double>>;

template <typename T>
Mat to_mat(const Tensor<T>& t) {
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = static_cast<double>(t.at(r, c));
  return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Mat mat_t(const Mat& a) {
  Mat out(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
  return out;
}

inline Mat softmax_loop(const Mat& a) {
  Mat out = a;
  for (auto& row : out) {
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double z = 0.0;
    for (double& v : row) z += (v = std::exp(v - mx));
    for (double& v : row) v /= z;
  }
  return out;
}

inline std::vector<double> max_pool_loop(const Mat& a) {
  std::vector<double> out = a[0];
  for (const auto& row : a)
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = std::max(out[j], row[j]);
  return out;
}

inline Mat relu_loop(Mat a) {
  for (auto& row : a)
    for (double& v : row) v = std::max(v, 0.0);
  return a;
}

inline double max_abs_diff(const std::vector<double>& a, std::span<const float> b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline std::string data_path(const std::string& rel) { return std::string(CTM_TEST_DATA) + "/" + rel; }

}  // namespace ctm::test
