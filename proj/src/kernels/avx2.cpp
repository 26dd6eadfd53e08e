// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "tables.hpp"

namespace tls::kernels::detail {
namespace {

constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// pi/2 split into pieces whose products with the quadrant index stay exact.
constexpr double kPio2a = 1.57079632673412561417e+00;
constexpr double kPio2b = 6.07710050630396597660e-11;
constexpr double kPio2c = 2.02226624871116645580e-21;

// Minimax coefficients for |r| <= pi/4 (fdlibm kernels).
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;
constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2a), x);
    r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2b), r);
    r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2c), r);

    const __m256d z = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_fmadd_pd(z, _mm256_set1_pd(S6), _mm256_set1_pd(S5));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S4));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S3));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S2));
    ps = _mm256_fmadd_pd(z, ps, _mm256_set1_pd(S1));
    const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(z, r), ps, r);

    __m256d pc = _mm256_fmadd_pd(z, _mm256_set1_pd(C6), _mm256_set1_pd(C5));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C4));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C3));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C2));
    pc = _mm256_fmadd_pd(z, pc, _mm256_set1_pd(C1));
    const __m256d hz = _mm256_mul_pd(_mm256_set1_pd(0.5), z);
    const __m256d w = _mm256_sub_pd(_mm256_set1_pd(1.0), hz);
    // w + ((1 - w) - hz) recovers the rounding of 1 - hz before the tail is added.
    const __m256d corr = _mm256_sub_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), w), hz);
    const __m256d cos_r = _mm256_add_pd(w, _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, corr));

    // Low bits of the quadrant index via the 1.5 * 2^52 trick.
    const __m256i qi = _mm256_castpd_si256(_mm256_add_pd(q, _mm256_set1_pd(6755399441055744.0)));
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256d odd = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
    const __m256d s = _mm256_blendv_pd(sin_r, cos_r, odd);
    const __m256d c = _mm256_blendv_pd(cos_r, sin_r, odd);
    const __m256d s_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(qi, two), 62));
    const __m256d c_sign =
        _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), 62));
    s_out = _mm256_xor_pd(s, s_sign);
    c_out = _mm256_xor_pd(c, c_sign);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Copies up to three trailing elements into a zero-padded lane block.
inline __m256d load_tail(const double* p, std::size_t k) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    std::memcpy(buf, p, k * sizeof(double));
    return _mm256_load_pd(buf);
}

inline void store_tail(double* p, __m256d v, std::size_t k) {
    alignas(32) double buf[4];
    _mm256_store_pd(buf, v);
    std::memcpy(p, buf, k * sizeof(double));
}

void sincos_avx2(const double* x, double* s, double* c, std::size_t n) {
    std::size_t i = 0;
    __m256d vs, vc;
    for (; i + 4 <= n; i += 4) {
        sincos4(_mm256_loadu_pd(x + i), vs, vc);
        _mm256_storeu_pd(s + i, vs);
        _mm256_storeu_pd(c + i, vc);
    }
    if (i < n) {
        sincos4(load_tail(x + i, n - i), vs, vc);
        store_tail(s + i, vs, n - i);
        store_tail(c + i, vc, n - i);
    }
}

inline __m256d segment4(const Segment& seg, __m256d s) {
    __m256d sn, cs;
    sincos4(_mm256_mul_pd(_mm256_set1_pd(seg.energy), s), sn, cs);
    __m256d C = _mm256_fmadd_pd(_mm256_set1_pd(seg.cs), sn, _mm256_mul_pd(_mm256_set1_pd(seg.c0), cs));
    __m256d D = _mm256_fmadd_pd(_mm256_set1_pd(seg.ds), sn, _mm256_mul_pd(_mm256_set1_pd(seg.d0), cs));
    return _mm256_fmadd_pd(C, C, _mm256_mul_pd(D, D));
}

void segment_p12_avx2(const Segment& seg, const double* s, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, segment4(seg, _mm256_loadu_pd(s + i)));
    if (i < n) store_tail(out + i, segment4(seg, load_tail(s + i, n - i)), n - i);
}

Projection project_avx2(const double* s, const double* w, const double* p, std::size_t n, double omega) {
    const __m256d om = _mm256_set1_pd(omega);
    __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
    __m256d sn, cs;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        sincos4(_mm256_mul_pd(om, _mm256_loadu_pd(s + i)), sn, cs);
        __m256d wp = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(p + i));
        re = _mm256_fmadd_pd(wp, cs, re);
        im = _mm256_fmadd_pd(wp, sn, im);
    }
    if (i < n) {
        std::size_t k = n - i;
        sincos4(_mm256_mul_pd(om, load_tail(s + i, k)), sn, cs);
        __m256d wp = _mm256_mul_pd(load_tail(w + i, k), load_tail(p + i, k));
        re = _mm256_fmadd_pd(wp, cs, re);
        im = _mm256_fmadd_pd(wp, sn, im);
    }
    return {hsum(re), hsum(im)};
}

inline __m256d model4(const ModelView& m, __m256d t) {
    __m256d v = _mm256_set1_pd(m.offset);
    __m256d sn, cs;
    for (std::size_t j = 0; j < m.terms; ++j) {
        __m256d x = _mm256_fmsub_pd(_mm256_set1_pd(m.frequency[j]), t, _mm256_set1_pd(m.phase[j]));
        sincos4(x, sn, cs);
        v = _mm256_fmadd_pd(_mm256_set1_pd(m.amplitude[j]), cs, v);
    }
    return v;
}

void eval_model_avx2(const ModelView& m, const double* t, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, model4(m, _mm256_loadu_pd(t + i)));
    if (i < n) store_tail(out + i, model4(m, load_tail(t + i, n - i)), n - i);
}

double weighted_abs_error_avx2(const ModelView& m, const double* t, const double* w, const double* p,
                               std::size_t n) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), model4(m, _mm256_loadu_pd(t + i)));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_and_pd(d, abs_mask), acc);
    }
    if (i < n) {
        std::size_t k = n - i;
        // Zero-padded weights cancel the padded lanes.
        __m256d d = _mm256_sub_pd(load_tail(p + i, k), model4(m, load_tail(t + i, k)));
        acc = _mm256_fmadd_pd(load_tail(w + i, k), _mm256_and_pd(d, abs_mask), acc);
    }
    return hsum(acc);
}

}  // namespace

const Table avx2_table{Isa::Avx2,       sincos_avx2,     segment_p12_avx2,
                       project_avx2,    eval_model_avx2, weighted_abs_error_avx2};

}  // namespace tls::kernels::detail
