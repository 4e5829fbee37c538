#include "gepbench/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gepbench::kern {

namespace {

// Per-row routines shared by the OpenMP drivers and the serial reference.
// Keeping one copy of the arithmetic is what makes the two paths bitwise
// equal: each output element sees the identical instruction sequence.

inline void row_matmul(const double* arow, const Matrix& b, double* crow,
                       std::size_t k, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
        const double av = arow[p];
        const double* brow = b.row(p);
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
}

// one output row p of c = a^T b:  c[p][j] = sum_i a[i][p] * b[i][j]
inline void row_matmul_at_b(const Matrix& a, const Matrix& b, double* crow,
                            std::size_t p, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double av = a(i, p);
        const double* brow = b.row(i);
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
}

inline void row_matmul_a_bt(const double* arow, const Matrix& b, double* crow,
                            std::size_t n, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        const double* brow = b.row(j);
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) s += arow[p] * brow[p];
        crow[j] = s;
    }
}

inline void row_add_bias(double* xrow, const double* bias, std::size_t c) {
    for (std::size_t j = 0; j < c; ++j) xrow[j] += bias[j];
}

inline void row_relu(double* xrow, std::size_t c) {
    for (std::size_t j = 0; j < c; ++j) xrow[j] = xrow[j] > 0.0 ? xrow[j] : 0.0;
}

inline void row_relu_backward(const double* pre, double* grad, std::size_t c) {
    for (std::size_t j = 0; j < c; ++j)
        if (pre[j] <= 0.0) grad[j] = 0.0;
}

inline void row_tanh(double* xrow, std::size_t c) {
    for (std::size_t j = 0; j < c; ++j) xrow[j] = std::tanh(xrow[j]);
}

inline void row_tanh_backward(const double* act, double* grad, std::size_t c) {
    for (std::size_t j = 0; j < c; ++j) grad[j] *= 1.0 - act[j] * act[j];
}

inline void row_softmax(double* xrow, std::size_t c) {
    double mx = xrow[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, xrow[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        xrow[j] = std::exp(xrow[j] - mx);
        sum += xrow[j];
    }
    for (std::size_t j = 0; j < c; ++j) xrow[j] /= sum;
}

// Fills grad row and returns the row's cross-entropy term.
inline double row_ce_grad(const double* probs, int label, double* grad,
                          std::size_t c, double inv_rows) {
    for (std::size_t j = 0; j < c; ++j) grad[j] = probs[j] * inv_rows;
    grad[label] -= inv_rows;
    return -std::log(std::max(probs[label], 1e-300));
}

inline void check_dims(bool ok, const char* what) {
    if (!ok) fail(ErrorKind::dim_mismatch, what);
}

constexpr std::size_t kParallelCutoff = 16 * 1024; // elements of work

} // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.cols() == b.rows(), "matmul: inner dims differ");
    c = Matrix(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
#pragma omp parallel for schedule(static) if (m * k * n > kParallelCutoff)
    for (std::size_t i = 0; i < m; ++i) row_matmul(a.row(i), b, c.row(i), k, n);
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.rows() == b.rows(), "matmul_at_b: row counts differ");
    c = Matrix(a.cols(), b.cols());
    const std::size_t k = a.cols(), n = b.cols();
#pragma omp parallel for schedule(static) if (a.rows() * k * n > kParallelCutoff)
    for (std::size_t p = 0; p < k; ++p) row_matmul_at_b(a, b, c.row(p), p, n);
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.cols() == b.cols(), "matmul_a_bt: col counts differ");
    c = Matrix(a.rows(), b.rows());
    const std::size_t m = a.rows(), n = a.cols(), k = b.rows();
#pragma omp parallel for schedule(static) if (m * n * k > kParallelCutoff)
    for (std::size_t i = 0; i < m; ++i)
        row_matmul_a_bt(a.row(i), b, c.row(i), n, k);
}

void add_row_bias(Matrix& x, const std::vector<double>& bias) {
    check_dims(x.cols() == bias.size(), "add_row_bias: bias length != cols");
#pragma omp parallel for schedule(static) if (x.size() > kParallelCutoff)
    for (std::size_t i = 0; i < x.rows(); ++i)
        row_add_bias(x.row(i), bias.data(), x.cols());
}

void relu(Matrix& x) {
#pragma omp parallel for schedule(static) if (x.size() > kParallelCutoff)
    for (std::size_t i = 0; i < x.rows(); ++i) row_relu(x.row(i), x.cols());
}

void relu_backward(const Matrix& pre, Matrix& grad) {
    check_dims(pre.rows() == grad.rows() && pre.cols() == grad.cols(),
               "relu_backward: shape mismatch");
#pragma omp parallel for schedule(static) if (grad.size() > kParallelCutoff)
    for (std::size_t i = 0; i < grad.rows(); ++i)
        row_relu_backward(pre.row(i), grad.row(i), grad.cols());
}

void tanh_act(Matrix& x) {
#pragma omp parallel for schedule(static) if (x.size() > kParallelCutoff)
    for (std::size_t i = 0; i < x.rows(); ++i) row_tanh(x.row(i), x.cols());
}

void tanh_backward(const Matrix& act, Matrix& grad) {
    check_dims(act.rows() == grad.rows() && act.cols() == grad.cols(),
               "tanh_backward: shape mismatch");
#pragma omp parallel for schedule(static) if (grad.size() > kParallelCutoff)
    for (std::size_t i = 0; i < grad.rows(); ++i)
        row_tanh_backward(act.row(i), grad.row(i), grad.cols());
}

void softmax_rows(Matrix& x) {
    check_dims(x.cols() >= 1, "softmax_rows: empty rows");
#pragma omp parallel for schedule(static) if (x.size() > kParallelCutoff)
    for (std::size_t i = 0; i < x.rows(); ++i) row_softmax(x.row(i), x.cols());
}

double cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels,
                          Matrix& grad) {
    check_dims(probs.rows() == labels.size(), "cross_entropy_grad: labels");
    grad = Matrix(probs.rows(), probs.cols());
    const double inv_rows = 1.0 / static_cast<double>(probs.rows());
    std::vector<double> per_row(probs.rows());
#pragma omp parallel for schedule(static) if (probs.size() > kParallelCutoff)
    for (std::size_t i = 0; i < probs.rows(); ++i)
        per_row[i] = row_ce_grad(probs.row(i), labels[i], grad.row(i),
                                 probs.cols(), inv_rows);
    double loss = 0.0; // summed in row order: deterministic
    for (double v : per_row) loss += v;
    return loss * inv_rows;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
    check_dims(x.rows() == y.rows() && x.cols() == y.cols(), "axpy: shape");
    double* yd = y.data();
    const double* xd = x.data();
    const std::size_t n = x.size();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
    for (std::size_t i = 0; i < n; ++i) yd[i] += alpha * xd[i];
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    check_dims(x.size() == y.size(), "axpy: length");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

namespace ref {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.cols() == b.rows(), "matmul: inner dims differ");
    c = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        row_matmul(a.row(i), b, c.row(i), a.cols(), b.cols());
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.rows() == b.rows(), "matmul_at_b: row counts differ");
    c = Matrix(a.cols(), b.cols());
    for (std::size_t p = 0; p < a.cols(); ++p)
        row_matmul_at_b(a, b, c.row(p), p, b.cols());
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    check_dims(a.cols() == b.cols(), "matmul_a_bt: col counts differ");
    c = Matrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        row_matmul_a_bt(a.row(i), b, c.row(i), a.cols(), b.rows());
}

void add_row_bias(Matrix& x, const std::vector<double>& bias) {
    check_dims(x.cols() == bias.size(), "add_row_bias: bias length != cols");
    for (std::size_t i = 0; i < x.rows(); ++i)
        row_add_bias(x.row(i), bias.data(), x.cols());
}

void relu(Matrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) row_relu(x.row(i), x.cols());
}

void relu_backward(const Matrix& pre, Matrix& grad) {
    for (std::size_t i = 0; i < grad.rows(); ++i)
        row_relu_backward(pre.row(i), grad.row(i), grad.cols());
}

void tanh_act(Matrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) row_tanh(x.row(i), x.cols());
}

void tanh_backward(const Matrix& act, Matrix& grad) {
    for (std::size_t i = 0; i < grad.rows(); ++i)
        row_tanh_backward(act.row(i), grad.row(i), grad.cols());
}

void softmax_rows(Matrix& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) row_softmax(x.row(i), x.cols());
}

double cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels,
                          Matrix& grad) {
    check_dims(probs.rows() == labels.size(), "cross_entropy_grad: labels");
    grad = Matrix(probs.rows(), probs.cols());
    const double inv_rows = 1.0 / static_cast<double>(probs.rows());
    std::vector<double> per_row(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i)
        per_row[i] = row_ce_grad(probs.row(i), labels[i], grad.row(i),
                                 probs.cols(), inv_rows);
    double loss = 0.0;
    for (double v : per_row) loss += v;
    return loss * inv_rows;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
    check_dims(x.rows() == y.rows() && x.cols() == y.cols(), "axpy: shape");
    for (std::size_t i = 0; i < x.size(); ++i)
        y.data()[i] += alpha * x.data()[i];
}

} // namespace ref

} // namespace gepbench::kern
