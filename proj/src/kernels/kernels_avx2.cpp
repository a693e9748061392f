// AVX2/FMA variants. This unit is compiled with -mavx2 -mfma and is only
// entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstdint>

#include "hetnet/kernels.hpp"

namespace hetnet::kernels::detail {

namespace {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

// exp(x) by k = round(x / ln 2), reduced argument |r| <= ln2 / 2 and a
// degree-13 Taylor polynomial; 2^k is applied as two halves so the scale
// stays representable down into the subnormal range.
inline __m256d exp_pd(__m256d x) {
    x = _mm256_max_pd(_mm256_min_pd(x, splat(800.0)), splat(-1400.0));
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634074)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, splat(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(k, splat(1.90821492927058770002e-10), r);

    __m256d p = splat(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, splat(0.5));
    p = _mm256_fmadd_pd(p, r, splat(1.0));
    p = _mm256_fmadd_pd(p, r, splat(1.0));

    // Split 2^k = 2^k1 * 2^k2; integers recovered with the 1.5 * 2^52 rounding constant.
    const __m256d magic = splat(6755399441055744.0);
    auto to_i64 = [&](__m256d v) {
        return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)), _mm256_castpd_si256(magic));
    };
    const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, splat(0.5)));
    const __m256i k1_64 = to_i64(k1);
    const __m256i k2_64 = to_i64(_mm256_sub_pd(k, k1));
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(k1_64, bias), 52));
    const __m256d s2 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(k2_64, bias), 52));
    return _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);
}

// log(x) for x >= 0: x = 2^e m with m in [sqrt(1/2), sqrt(2)), then
// log m = 2 atanh(f), f = (m - 1) / (m + 1), summed to f^23.
inline __m256d log_pd(__m256d x) {
    const __m256d tiny = splat(2.2250738585072014e-308);
    const __m256d is_sub = _mm256_cmp_pd(x, tiny, _CMP_LT_OQ);
    const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, splat(4503599627370496.0)), is_sub);  // 2^52
    const __m256d e_adj = _mm256_blendv_pd(_mm256_setzero_pd(), splat(52.0), is_sub);

    const __m256i bits = _mm256_castpd_si256(xs);
    const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
    const __m256d two52 = splat(4503599627370496.0);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(two52))), two52);
    e = _mm256_sub_pd(e, _mm256_add_pd(splat(1023.0), e_adj));

    const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    const __m256d big = _mm256_cmp_pd(m, splat(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, splat(1.0)));

    const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, splat(1.0)), _mm256_add_pd(m, splat(1.0)));
    const __m256d s = _mm256_mul_pd(f, f);
    __m256d p = splat(1.0 / 23.0);
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 21.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 19.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 17.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 15.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 13.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 11.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 9.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 7.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 5.0));
    p = _mm256_fmadd_pd(p, s, splat(1.0 / 3.0));
    // log m = 2 f + 2 f s p
    const __m256d two_f = _mm256_add_pd(f, f);
    const __m256d logm = _mm256_fmadd_pd(_mm256_mul_pd(two_f, s), p, two_f);
    __m256d out = _mm256_fmadd_pd(e, splat(1.90821492927058770002e-10), logm);
    out = _mm256_fmadd_pd(e, splat(6.93147180369123816490e-01), out);

    const __m256d zero = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ);
    const __m256d inf = _mm256_cmp_pd(x, splat(INFINITY), _CMP_EQ_OQ);
    const __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    out = _mm256_blendv_pd(out, splat(-INFINITY), zero);
    out = _mm256_blendv_pd(out, splat(INFINITY), inf);
    out = _mm256_blendv_pd(out, splat(NAN), neg);
    return out;
}

// s / (s + d^alpha); the caller handles s == 0.
inline __m256d complement_pd(__m256d s, __m256d dsq, __m256d half_alpha) {
    const __m256d da = exp_pd(_mm256_mul_pd(half_alpha, log_pd(dsq)));
    return _mm256_div_pd(s, _mm256_add_pd(s, da));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void pgfl_complement_avx2(const double* d1sq, const double* d2sq, std::size_t n, double s1, double s2,
                          double half_alpha, double* out) {
    const __m256d vs1 = splat(s1);
    const __m256d vs2 = splat(s2);
    const __m256d vh = splat(half_alpha);
    auto block = [&](const double* a, const double* b, double* o) {
        const __m256d p = s1 == 0.0 ? _mm256_setzero_pd() : complement_pd(vs1, _mm256_loadu_pd(a), vh);
        const __m256d q = s2 == 0.0 ? _mm256_setzero_pd() : complement_pd(vs2, _mm256_loadu_pd(b), vh);
        _mm256_storeu_pd(o, _mm256_sub_pd(_mm256_add_pd(p, q), _mm256_mul_pd(p, q)));
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) block(d1sq + i, d2sq + i, out + i);
    if (i < n) {
        std::array<double, 4> a{1.0, 1.0, 1.0, 1.0};
        std::array<double, 4> b{1.0, 1.0, 1.0, 1.0};
        std::array<double, 4> o{};
        for (std::size_t j = 0; i + j < n; ++j) {
            a[j] = d1sq[i + j];
            b[j] = d2sq[i + j];
        }
        block(a.data(), b.data(), o.data());
        for (std::size_t j = 0; i + j < n; ++j) out[i + j] = o[j];
    }
}

double sum_power_law_avx2(const double* xs, const double* ys, const double* gain, std::size_t n, double at_x,
                          double at_y, double half_alpha) {
    const __m256d ax = splat(at_x);
    const __m256d ay = splat(at_y);
    const __m256d nh = splat(-half_alpha);
    __m256d acc = _mm256_setzero_pd();
    auto block = [&](const double* x, const double* y, const double* g) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x), ax);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y), ay);
        const __m256d dsq = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const __m256d vg = _mm256_loadu_pd(g);
        const __m256d term = _mm256_mul_pd(vg, exp_pd(_mm256_mul_pd(nh, log_pd(dsq))));
        const __m256d live = _mm256_cmp_pd(vg, _mm256_setzero_pd(), _CMP_NEQ_UQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(live, term));
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) block(xs + i, ys + i, gain + i);
    if (i < n) {
        std::array<double, 4> x{1.0, 1.0, 1.0, 1.0};
        std::array<double, 4> y{1.0, 1.0, 1.0, 1.0};
        std::array<double, 4> g{};
        for (std::size_t j = 0; i + j < n; ++j) {
            x[j] = xs[i + j];
            y[j] = ys[i + j];
            g[j] = gain[i + j];
        }
        block(x.data(), y.data(), g.data());
    }
    return hsum(acc);
}

NearestResult nearest_avx2(const double* xs, const double* ys, std::size_t n, double at_x, double at_y) {
    const __m256d ax = splat(at_x);
    const __m256d ay = splat(at_y);
    __m256d best_d = splat(INFINITY);
    __m256d best_i = splat(0.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = splat(4.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), ax);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), ay);
        const __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
        best_d = _mm256_blendv_pd(best_d, d, lt);
        best_i = _mm256_blendv_pd(best_i, idx, lt);
        idx = _mm256_add_pd(idx, step);
    }
    alignas(32) std::array<double, 4> ld{};
    alignas(32) std::array<double, 4> li{};
    _mm256_store_pd(ld.data(), best_d);
    _mm256_store_pd(li.data(), best_i);
    NearestResult best{0, INFINITY};
    for (std::size_t l = 0; l < 4; ++l) {
        const auto li_idx = static_cast<std::size_t>(li[l]);
        if (ld[l] < best.dist_sq || (ld[l] == best.dist_sq && li_idx < best.index)) best = {li_idx, ld[l]};
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - at_x;
        const double dy = ys[i] - at_y;
        const double d = dx * dx + dy * dy;
        if (d < best.dist_sq) best = {i, d};
    }
    return best;
}

void exponential_from_uniform_avx2(double* u, std::size_t n) {
    const __m256d neg_zero = splat(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(u + i, _mm256_xor_pd(log_pd(_mm256_loadu_pd(u + i)), neg_zero));
    if (i < n) {
        std::array<double, 4> t{1.0, 1.0, 1.0, 1.0};
        for (std::size_t j = 0; i + j < n; ++j) t[j] = u[i + j];
        _mm256_storeu_pd(t.data(), _mm256_xor_pd(log_pd(_mm256_loadu_pd(t.data())), neg_zero));
        for (std::size_t j = 0; i + j < n; ++j) u[i + j] = t[j];
    }
}

}  // namespace hetnet::kernels::detail
