#pragma once

// Batch evaluators behind the dense-sampling paths. Each entry point has a
// scalar reference and an AVX2/FMA variant; the variant is picked once at
// startup from CPUID. Setting TLSDRIVE_FORCE_SCALAR=1 pins the scalar path.

#include <cstddef>

namespace tls::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

// Transition probability inside one constant segment with local time s:
//   C(s) = c0 cos(E s) + cs sin(E s),  D(s) = d0 cos(E s) + ds sin(E s),
//   P(s) = C(s)^2 + D(s)^2.
struct Segment {
    double c0, cs, d0, ds, energy;
};

// Re/Im of sum_i w_i p_i exp(i omega s_i).
struct Projection {
    double re = 0.0;
    double im = 0.0;
};

// Cosine model b0 + sum_j amp_j cos(freq_j t - phase_j).
struct ModelView {
    double offset;
    const double* frequency;
    const double* amplitude;
    const double* phase;
    std::size_t terms;
};

struct Table {
    Isa isa;
    void (*sincos)(const double* x, double* s, double* c, std::size_t n);
    void (*segment_p12)(const Segment& seg, const double* s, double* out, std::size_t n);
    Projection (*project)(const double* s, const double* w, const double* p, std::size_t n, double omega);
    void (*eval_model)(const ModelView& model, const double* t, double* out, std::size_t n);
    // sum_i w_i |p_i - model(t_i)|
    double (*weighted_abs_error)(const ModelView& model, const double* t, const double* w, const double* p,
                                 std::size_t n);
};

bool avx2_supported();
// Throws std::invalid_argument when the ISA is not usable on this CPU.
const Table& table(Isa isa);
const Table& active();
Isa active_isa();
// For tests and benchmarks; not thread safe against concurrent kernel calls.
void set_active(Isa isa);

inline void sincos(const double* x, double* s, double* c, std::size_t n) { active().sincos(x, s, c, n); }
inline void segment_p12(const Segment& seg, const double* s, double* out, std::size_t n) {
    active().segment_p12(seg, s, out, n);
}
inline Projection project(const double* s, const double* w, const double* p, std::size_t n, double omega) {
    return active().project(s, w, p, n, omega);
}
inline void eval_model(const ModelView& model, const double* t, double* out, std::size_t n) {
    active().eval_model(model, t, out, n);
}
inline double weighted_abs_error(const ModelView& model, const double* t, const double* w, const double* p,
                                 std::size_t n) {
    return active().weighted_abs_error(model, t, w, p, n);
}

}  // namespace tls::kernels
