#include <cmath>
#include <cstdlib>

#include "tables.hpp"

namespace tls::kernels::detail {
namespace {

void sincos_scalar(const double* x, double* s, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
}

void segment_p12_scalar(const Segment& seg, const double* s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double x = seg.energy * s[i];
        double sn = std::sin(x), cs = std::cos(x);
        double C = seg.c0 * cs + seg.cs * sn;
        double D = seg.d0 * cs + seg.ds * sn;
        out[i] = C * C + D * D;
    }
}

Projection project_scalar(const double* s, const double* w, const double* p, std::size_t n, double omega) {
    Projection r;
    for (std::size_t i = 0; i < n; ++i) {
        double x = omega * s[i];
        double wp = w[i] * p[i];
        r.re += wp * std::cos(x);
        r.im += wp * std::sin(x);
    }
    return r;
}

double model_at(const ModelView& m, double t) {
    double v = m.offset;
    for (std::size_t j = 0; j < m.terms; ++j) v += m.amplitude[j] * std::cos(m.frequency[j] * t - m.phase[j]);
    return v;
}

void eval_model_scalar(const ModelView& m, const double* t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = model_at(m, t[i]);
}

double weighted_abs_error_scalar(const ModelView& m, const double* t, const double* w, const double* p,
                                 std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::abs(p[i] - model_at(m, t[i]));
    return acc;
}

}  // namespace

const Table scalar_table{Isa::Scalar,       sincos_scalar,     segment_p12_scalar,
                         project_scalar,    eval_model_scalar, weighted_abs_error_scalar};

}  // namespace tls::kernels::detail
