#pragma once

// Hot inner loops shared by the analytic integrands and the simulator.
// Each kernel has a scalar reference and an AVX2/FMA variant; the variant is
// picked once at startup from CPUID, and HETNET_SIMD=scalar forces the
// reference path.

#include <cstddef>
#include <string_view>

namespace hetnet::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);

struct NearestResult {
    std::size_t index = 0;
    double dist_sq = 0.0;
};

struct KernelTable {
    Backend backend = Backend::Scalar;

    /// out[i] = 1 - g(s1, d1) g(s2, d2) with g(s, d) = 1 / (1 + s d^-alpha),
    /// distances given squared and half_alpha = alpha / 2. s = 0 makes the
    /// factor 1; a zero distance with s > 0 makes it 0.
    void (*pgfl_complement)(const double* d1sq, const double* d2sq, std::size_t n, double s1, double s2,
                            double half_alpha, double* out);

    /// sum_i gain[i] * |p_i - at|^-alpha over points with gain[i] != 0.
    double (*sum_power_law)(const double* xs, const double* ys, const double* gain, std::size_t n, double at_x,
                            double at_y, double half_alpha);

    /// Point closest to `at`; ties resolve to the lowest index. n must be > 0.
    NearestResult (*nearest)(const double* xs, const double* ys, std::size_t n, double at_x, double at_y);

    /// In place: u[i] in (0, 1] becomes the unit-mean exponential -log(u[i]).
    void (*exponential_from_uniform)(double* u, std::size_t n);
};

/// The dispatched table.
const KernelTable& active();

/// Reference table, always available.
const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

namespace detail {
// Implementations; the AVX2 ones live in a separately compiled unit.
void pgfl_complement_scalar(const double*, const double*, std::size_t, double, double, double, double*);
double sum_power_law_scalar(const double*, const double*, const double*, std::size_t, double, double, double);
NearestResult nearest_scalar(const double*, const double*, std::size_t, double, double);
void exponential_from_uniform_scalar(double*, std::size_t);

void pgfl_complement_avx2(const double*, const double*, std::size_t, double, double, double, double*);
double sum_power_law_avx2(const double*, const double*, const double*, std::size_t, double, double, double);
NearestResult nearest_avx2(const double*, const double*, std::size_t, double, double);
void exponential_from_uniform_avx2(double*, std::size_t);
}  // namespace detail

}  // namespace hetnet::kernels
