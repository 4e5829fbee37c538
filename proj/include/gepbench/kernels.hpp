#pragma once

#include <cstddef>

#include "gepbench/matrix.hpp"

namespace gepbench::kern {

// OpenMP-parallel kernels. Work is partitioned over independent output rows
// and every output element is produced by one thread running the same
// sequential per-element arithmetic as the serial reference, so results are
// bitwise identical to kern::ref regardless of thread count. No kernel does
// a cross-thread floating-point reduction.

// c(m x n) = a(m x k) * b(k x n)
void matmul(const Matrix& a, const Matrix& b, Matrix& c);

// c(k x n) = a^T * b where a is (m x k), b is (m x n)
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c);

// c(m x k) = a * b^T where a is (m x n), b is (k x n)
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c);

// x(r x c) += bias broadcast over rows
void add_row_bias(Matrix& x, const std::vector<double>& bias);

void relu(Matrix& x);
// grad *= 1[pre > 0]
void relu_backward(const Matrix& pre, Matrix& grad);

void tanh_act(Matrix& x);
// grad *= (1 - act^2) where act is the post-activation value
void tanh_backward(const Matrix& act, Matrix& grad);

// Row-wise softmax in place, max-subtracted for stability.
void softmax_rows(Matrix& x);

// probs: row-wise softmax output; labels: one per row.
// grad = (probs - onehot) / rows. Returns mean cross-entropy loss.
// The loss sum runs serially in row order in both variants.
double cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels,
                          Matrix& grad);

// y += alpha * x (elementwise over equal-sized matrices)
void axpy(double alpha, const Matrix& x, Matrix& y);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

// Serial reference implementations, kept for testing and benchmarking.
namespace ref {
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c);
void add_row_bias(Matrix& x, const std::vector<double>& bias);
void relu(Matrix& x);
void relu_backward(const Matrix& pre, Matrix& grad);
void tanh_act(Matrix& x);
void tanh_backward(const Matrix& act, Matrix& grad);
void softmax_rows(Matrix& x);
double cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels,
                          Matrix& grad);
void axpy(double alpha, const Matrix& x, Matrix& y);
} // namespace ref

} // namespace gepbench::kern
