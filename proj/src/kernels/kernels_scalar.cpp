#include <cmath>
#include <cstdlib>
#include <string_view>

#include "hetnet/kernels.hpp"

namespace hetnet::kernels {

std::string_view to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

namespace detail {

namespace {

// 1 - g(s, d) = s / (s + d^alpha), written so that d = 0 gives 1 and s = 0 gives 0.
inline double complement(double s, double dsq, double half_alpha) {
    if (s == 0.0) return 0.0;
    return s / (s + std::exp(half_alpha * std::log(dsq)));
}

}  // namespace

void pgfl_complement_scalar(const double* d1sq, const double* d2sq, std::size_t n, double s1, double s2,
                            double half_alpha, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double p = complement(s1, d1sq[i], half_alpha);
        const double q = complement(s2, d2sq[i], half_alpha);
        out[i] = p + q - p * q;
    }
}

double sum_power_law_scalar(const double* xs, const double* ys, const double* gain, std::size_t n, double at_x,
                            double at_y, double half_alpha) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gain[i] == 0.0) continue;
        const double dx = xs[i] - at_x;
        const double dy = ys[i] - at_y;
        acc += gain[i] * std::exp(-half_alpha * std::log(dx * dx + dy * dy));
    }
    return acc;
}

NearestResult nearest_scalar(const double* xs, const double* ys, std::size_t n, double at_x, double at_y) {
    NearestResult best{0, INFINITY};
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - at_x;
        const double dy = ys[i] - at_y;
        const double d = dx * dx + dy * dy;
        if (d < best.dist_sq) best = {i, d};
    }
    return best;
}

void exponential_from_uniform_scalar(double* u, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) u[i] = -std::log(u[i]);
}

}  // namespace detail

namespace {

const KernelTable kScalar{Backend::Scalar, detail::pgfl_complement_scalar, detail::sum_power_law_scalar,
                          detail::nearest_scalar, detail::exponential_from_uniform_scalar};

#if defined(HETNET_HAVE_AVX2)
const KernelTable kAvx2{Backend::Avx2, detail::pgfl_complement_avx2, detail::sum_power_law_avx2,
                        detail::nearest_avx2, detail::exponential_from_uniform_avx2};

bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
    if (const char* env = std::getenv("HETNET_SIMD"); env != nullptr && std::string_view(env) == "scalar")
        return kScalar;
    if (const KernelTable* t = avx2_table()) return *t;
    return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(HETNET_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace hetnet::kernels
