#pragma once

#include <cstddef>
#include <string>

// Vectorized double-precision primitives behind a runtime-dispatched
// interface. Every hot loop in the library (subspace charts, MLP
// forward/backward, width estimation) funnels through these five calls.
//
// The scalar implementations are the reference semantics; the AVX2 variants
// are selected at startup when the CPU supports them and must agree with the
// scalar path to floating-point reassociation accuracy (see
// tests/test_kernels.cpp). Set LOSSTOMO_SIMD=scalar to pin the reference
// path.

namespace tomo::kernels {

enum class Isa { scalar, avx2 };

// ISA selected by the dispatcher (after env override).
Isa active_isa();
std::string isa_name(Isa isa);

// Test hook: force a specific implementation. Throws if the requested ISA is
// not available on this machine.
void force_isa(Isa isa);

// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a*x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] *= a
void scale(double* x, double a, std::size_t n);

// sum_i x[i]^2
double sumsq(const double* x, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

namespace detail {
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double* x, double a, std::size_t n);
double sumsq_scalar(const double* x, std::size_t n);
double sum_scalar(const double* x, std::size_t n);

double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double* x, double a, std::size_t n);
double sumsq_avx2(const double* x, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
}  // namespace detail

}  // namespace tomo::kernels
