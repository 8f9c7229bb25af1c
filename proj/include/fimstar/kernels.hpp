#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels behind the network layers.
//
// Every kernel has a portable reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once per process from the CPU
// feature set (override with FIMSTAR_ISA=scalar|avx2). Results of the two
// variants agree to rounding, not bit-for-bit, so a run is reproducible
// for a fixed variant.

namespace fimstar::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    /// C[m][n] = bias[n] + sum_k A[m][k] * B[n][k]. A is MxK, B is NxK,
    /// C is MxN, all row-major. bias may be null.
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    const double* bias, double* c);
    /// C[m][n] += sum_k A(m,k) * B[k][n], with A(m,k) = a[m*a_row + k*a_col].
    /// B is KxN and C is MxN, row-major.
    void (*gemm_acc)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                     std::size_t a_row, std::size_t a_col, const double* b, double* c);
    /// y += alpha * x
    void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
    double (*dot)(std::size_t n, const double* x, const double* y);
};

const KernelTable& scalar_table();
/// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

/// Replaces the active table; used by equivalence tests and benchmarks.
/// Returns false when the requested ISA is unavailable.
bool select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace fimstar::kernels
