#include "opflab/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace opflab::kern {

#if OPFLAB_AVX2_TU
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void scal(double, double*, std::size_t);
void vadd(const double*, const double*, double*, std::size_t);
void vmul(const double*, const double*, double*, std::size_t);
void relu(const double*, double*, std::size_t);
void relu_grad(const double*, const double*, double*, std::size_t);
void gemm(std::size_t, std::size_t, std::size_t, const double*, const double*,
          double*, bool);
void gemm_nt(std::size_t, std::size_t, std::size_t, const double*, const double*,
             double*, bool);
void gemm_tn(std::size_t, std::size_t, std::size_t, const double*, const double*,
             double*, bool);
}  // namespace avx2
#endif

namespace {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*vadd)(const double*, const double*, double*, std::size_t);
  void (*vmul)(const double*, const double*, double*, std::size_t);
  void (*relu)(const double*, double*, std::size_t);
  void (*relu_grad)(const double*, const double*, double*, std::size_t);
  void (*gemm)(std::size_t, std::size_t, std::size_t, const double*,
               const double*, double*, bool);
  void (*gemm_nt)(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, bool);
  void (*gemm_tn)(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, bool);
};

constexpr KernelTable kScalarTable = {
    scalar::dot,  scalar::sum,  scalar::axpy,      scalar::scal,
    scalar::vadd, scalar::vmul, scalar::relu,      scalar::relu_grad,
    scalar::gemm, scalar::gemm_nt, scalar::gemm_tn,
};

#if OPFLAB_AVX2_TU
constexpr KernelTable kAvx2Table = {
    avx2::dot,  avx2::sum,  avx2::axpy,      avx2::scal,
    avx2::vadd, avx2::vmul, avx2::relu,      avx2::relu_grad,
    avx2::gemm, avx2::gemm_nt, avx2::gemm_tn,
};
#endif

bool cpu_has_avx2() {
#if OPFLAB_AVX2_TU
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_default_isa() {
  if (const char* env = std::getenv("OPFLAB_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

struct Dispatch {
  Isa isa;
  const KernelTable* table;
  Dispatch() : isa(pick_default_isa()), table(&kScalarTable) {
#if OPFLAB_AVX2_TU
    if (isa == Isa::Avx2) table = &kAvx2Table;
#endif
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Isa active_isa() { return dispatch().isa; }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
  }
  return false;
}

void set_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error("kernel variant not supported on this host: " +
                             std::string(isa_name(isa)));
  dispatch().isa = isa;
  dispatch().table = &kScalarTable;
#if OPFLAB_AVX2_TU
  if (isa == Isa::Avx2) dispatch().table = &kAvx2Table;
#endif
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return dispatch().table->sum(x, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(alpha, x, y, n);
}
void scal(double alpha, double* x, std::size_t n) {
  dispatch().table->scal(alpha, x, n);
}
void vadd(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->vadd(a, b, out, n);
}
void vmul(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->vmul(a, b, out, n);
}
void relu(const double* x, double* out, std::size_t n) {
  dispatch().table->relu(x, out, n);
}
void relu_grad(const double* x, const double* g, double* out, std::size_t n) {
  dispatch().table->relu_grad(x, g, out, n);
}
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c, bool accumulate) {
  dispatch().table->gemm(m, n, k, a, b, c, accumulate);
}
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  dispatch().table->gemm_nt(m, n, k, a, b, c, accumulate);
}
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  dispatch().table->gemm_tn(m, n, k, a, b, c, accumulate);
}

}  // namespace opflab::kern
