#include "fimstar/kernels.hpp"

namespace fimstar::kernels {

namespace {

void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    const double* bias, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                acc += arow[p] * brow[p];
            }
            c[i * n + j] = (bias ? bias[j] : 0.0) + acc;
        }
    }
}

void gemm_acc_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                     std::size_t a_row, std::size_t a_col, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double alpha = a[i * a_row + p * a_col];
            if (alpha == 0.0) {
                continue;
            }
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += alpha * brow[j];
            }
        }
    }
}

void axpy_scalar(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar, gemm_nt_scalar, gemm_acc_scalar, axpy_scalar,
                                   dot_scalar};
    return table;
}

}  // namespace fimstar::kernels
