#include <doctest.h>

#include <array>
#include <omp.h>

#include "gepbench/kernels.hpp"
#include "gepbench/rng.hpp"

using namespace gepbench;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
    return m;
}

// plain triple loop, no shared helpers with the implementation
Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
            c(i, j) = s;
        }
    return c;
}

} // namespace

TEST_CASE("matmul agrees with a naive triple loop") {
    Rng rng(1);
    const std::vector<std::array<int, 3>> shapes = {
        {1, 1, 1}, {3, 5, 2}, {8, 8, 8}, {17, 31, 9}};
    for (const auto& [m, k, n] : shapes) {
        Matrix a = random_matrix(m, k, rng);
        Matrix b = random_matrix(k, n, rng);
        Matrix c;
        kern::matmul(a, b, c);
        Matrix expect = naive_matmul(a, b);
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(c.data()[i] == doctest::Approx(expect.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("parallel kernels match serial reference bitwise") {
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 1 + rng.below(40);
        const std::size_t k = 1 + rng.below(40);
        const std::size_t n = 1 + rng.below(40);
        Matrix a = random_matrix(m, k, rng);
        Matrix b = random_matrix(k, n, rng);
        Matrix c1, c2;
        kern::matmul(a, b, c1);
        kern::ref::matmul(a, b, c2);
        CHECK(c1 == c2);

        Matrix at = random_matrix(m, k, rng);
        Matrix bt = random_matrix(m, n, rng);
        Matrix d1, d2;
        kern::matmul_at_b(at, bt, d1);
        kern::ref::matmul_at_b(at, bt, d2);
        CHECK(d1 == d2);

        Matrix e1, e2;
        Matrix ea = random_matrix(m, n, rng);
        Matrix eb = random_matrix(k, n, rng);
        kern::matmul_a_bt(ea, eb, e1);
        kern::ref::matmul_a_bt(ea, eb, e2);
        CHECK(e1 == e2);

        Matrix s1 = random_matrix(m, n, rng);
        Matrix s2 = s1;
        kern::softmax_rows(s1);
        kern::ref::softmax_rows(s2);
        CHECK(s1 == s2);

        std::vector<int> labels(s1.rows());
        for (std::size_t i = 0; i < labels.size(); ++i)
            labels[i] = static_cast<int>(rng.below(n));
        Matrix g1, g2;
        const double l1 = kern::cross_entropy_grad(s1, labels, g1);
        const double l2 = kern::ref::cross_entropy_grad(s2, labels, g2);
        CHECK(l1 == l2);
        CHECK(g1 == g2);
    }
}

TEST_CASE("results do not depend on thread count") {
    Rng rng(3);
    Matrix a = random_matrix(150, 150, rng); // above the parallel cutoff
    Matrix b = random_matrix(150, 150, rng);
    const int saved = omp_get_max_threads();
    Matrix c1, c4;
    omp_set_num_threads(1);
    kern::matmul(a, b, c1);
    omp_set_num_threads(4);
    kern::matmul(a, b, c4);
    omp_set_num_threads(saved);
    CHECK(c1 == c4);
}

TEST_CASE("softmax rows are valid probability vectors") {
    Rng rng(4);
    Matrix x = random_matrix(50, 7, rng);
    kern::softmax_rows(x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            CHECK(x(i, j) > 0.0);
            sum += x(i, j);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dimension mismatches are structured errors") {
    Matrix a(2, 3), b(4, 2), c;
    CHECK_THROWS_AS(kern::matmul(a, b, c), Error);
    try {
        kern::matmul(a, b, c);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dim_mismatch);
    }
}
