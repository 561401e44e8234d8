#pragma once

// Dense f64 arithmetic kernels used by the tensor and network code.
// Every kernel has a scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active variant is picked at runtime from
// CPU capabilities and can be overridden with set_isa() or the
// OPFLAB_ISA environment variable (scalar|avx2).

#include <cstddef>
#include <string_view>

namespace opflab::kern {

enum class Isa { Scalar, Avx2 };

// Variant currently used by the dispatched entry points.
Isa active_isa();

// True if the variant is compiled in and the CPU supports it.
bool isa_supported(Isa isa);

// Force a variant. Throws std::runtime_error if unsupported.
void set_isa(Isa isa);

std::string_view isa_name(Isa isa);

// ---- reductions / vector ops ----------------------------------------------
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x *= alpha
void scal(double alpha, double* x, std::size_t n);
// out = a + b
void vadd(const double* a, const double* b, double* out, std::size_t n);
// out = a * b  (elementwise)
void vmul(const double* a, const double* b, double* out, std::size_t n);

// out = max(x, 0)
void relu(const double* x, double* out, std::size_t n);
// out = g where x > 0, else 0   (ReLU backward)
void relu_grad(const double* x, const double* g, double* out, std::size_t n);

// ---- small dense matrix products (row-major) -------------------------------
// C (m x n) = [C +] A (m x k) * B (k x n)
void gemm(std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, bool accumulate);
// C (m x n) = [C +] A (m x k) * B^T  with B stored (n x k)
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, bool accumulate);
// C (m x n) = [C +] A^T * B  with A stored (k x m), B stored (k x n)
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, bool accumulate);

// Scalar reference implementations, always available. Equivalence tests
// compare the dispatched kernels against these.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
void vadd(const double* a, const double* b, double* out, std::size_t n);
void vmul(const double* a, const double* b, double* out, std::size_t n);
void relu(const double* x, double* out, std::size_t n);
void relu_grad(const double* x, const double* g, double* out, std::size_t n);
void gemm(std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, bool accumulate);
}  // namespace scalar

}  // namespace opflab::kern
