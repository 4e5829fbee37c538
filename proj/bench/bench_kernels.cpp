// Times the OpenMP kernels against the serial reference on training-shaped
// workloads and checks the outputs match bitwise while at it.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gepbench/kernels.hpp"
#include "gepbench/rng.hpp"

using namespace gepbench;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian();
    return m;
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best,
                        std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial, double parallel,
            bool bitwise_equal) {
    std::printf("%-28s %10.3f ms %10.3f ms  x%-6.2f %s\n", name.c_str(),
                serial * 1e3, parallel * 1e3,
                parallel > 0 ? serial / parallel : 0.0,
                bitwise_equal ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = argc > 1 ? std::stoul(argv[1]) : 512;
    const int reps = argc > 2 ? std::stoi(argv[2]) : 5;

#ifdef _OPENMP
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif
    std::printf("size parameter n = %zu, best of %d reps\n\n", n, reps);
    std::printf("%-28s %13s %13s  %-7s\n", "kernel", "serial", "parallel",
                "speedup");

    Rng rng(1234);
    {
        Matrix a = random_matrix(n, n, rng);
        Matrix b = random_matrix(n, n, rng);
        Matrix c_ref, c_omp;
        const double ts = time_best_of(reps, [&] { kern::ref::matmul(a, b, c_ref); });
        const double tp = time_best_of(reps, [&] { kern::matmul(a, b, c_omp); });
        report("matmul " + std::to_string(n) + "^3", ts, tp, c_ref == c_omp);
    }
    {
        Matrix a = random_matrix(n, 64, rng);
        Matrix b = random_matrix(n, 64, rng);
        Matrix c_ref, c_omp;
        const double ts =
            time_best_of(reps, [&] { kern::ref::matmul_at_b(a, b, c_ref); });
        const double tp =
            time_best_of(reps, [&] { kern::matmul_at_b(a, b, c_omp); });
        report("matmul_at_b " + std::to_string(n) + "x64", ts, tp,
               c_ref == c_omp);
    }
    {
        Matrix x = random_matrix(n * 8, 64, rng);
        Matrix a = x, b = x;
        const double ts = time_best_of(reps, [&] {
            a = x;
            kern::ref::softmax_rows(a);
        });
        const double tp = time_best_of(reps, [&] {
            b = x;
            kern::softmax_rows(b);
        });
        report("softmax_rows " + std::to_string(n * 8) + "x64", ts, tp, a == b);
    }
    {
        Matrix probs = random_matrix(n * 8, 16, rng);
        kern::softmax_rows(probs);
        std::vector<int> labels(probs.rows());
        for (std::size_t i = 0; i < labels.size(); ++i)
            labels[i] = static_cast<int>(rng.below(16));
        Matrix g_ref, g_omp;
        double l_ref = 0, l_omp = 0;
        const double ts = time_best_of(reps, [&] {
            l_ref = kern::ref::cross_entropy_grad(probs, labels, g_ref);
        });
        const double tp = time_best_of(reps, [&] {
            l_omp = kern::cross_entropy_grad(probs, labels, g_omp);
        });
        report("cross_entropy " + std::to_string(n * 8) + "x16", ts, tp,
               g_ref == g_omp && l_ref == l_omp);
    }
    return 0;
}
