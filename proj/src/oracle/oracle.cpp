#include "tlsdrive/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace tls::oracle {

Mat2 Mat2::zero() {
    Mat2 z;
    z.m.fill(cplx{0.0});
    return z;
}

Mat2 Mat2::operator*(const Mat2& o) const {
    Mat2 r = zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j);
    return r;
}

Mat2 Mat2::operator*(cplx s) const {
    Mat2 r = *this;
    for (auto& x : r.m) x *= s;
    return r;
}

Mat2 Mat2::operator+(const Mat2& o) const {
    Mat2 r = *this;
    for (int k = 0; k < 4; ++k) r.m[k] += o.m[k];
    return r;
}

Mat2 Mat2::adjoint() const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
    double d = 0.0;
    for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a.m[k] - b.m[k]));
    return d;
}

double unitarity_defect(const Mat2& a) { return max_abs_diff(a.adjoint() * a, Mat2{}); }

Mat2 hamiltonian(const DriveStep& step) {
    Mat2 h = Mat2::zero();
    const cplx off = step.epsilon * std::polar(1.0, step.theta);
    h(0, 1) = off;
    h(1, 0) = std::conj(off);
    h(1, 1) = step.delta;
    return h;
}

namespace {

Mat2 expm_eigen(const Mat2& h, double s) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const cplx b = h(0, 1);
    const double mean = 0.5 * (a + d), half = 0.5 * (a - d);
    const double r = std::sqrt(half * half + std::norm(b));
    const cplx phase = std::polar(1.0, -mean * s);
    if (r == 0.0) return Mat2{} * phase;

    // Eigenvector of lambda_+ = mean + r; choose the better-conditioned form.
    cplx v0, v1;
    if (half >= 0.0) {
        v0 = half + r;
        v1 = std::conj(b);
    } else {
        v0 = b;
        v1 = r - half;
    }
    const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    v0 /= nrm;
    v1 /= nrm;
    Mat2 pp = Mat2::zero();  // projector onto the + eigenvector
    pp(0, 0) = v0 * std::conj(v0);
    pp(0, 1) = v0 * std::conj(v1);
    pp(1, 0) = v1 * std::conj(v0);
    pp(1, 1) = v1 * std::conj(v1);
    Mat2 pm = Mat2{} + pp * cplx{-1.0};
    return (pp * std::polar(1.0, -r * s) + pm * std::polar(1.0, r * s)) * phase;
}

Mat2 expm_scaling_squaring(const Mat2& h, double s) {
    Mat2 x = h * cplx{0.0, -s};
    double norm = 0.0;
    for (const auto& e : x.m) norm = std::max(norm, std::abs(e));
    int squarings = 0;
    while (norm > 0.125) {
        norm *= 0.5;
        ++squarings;
    }
    x = x * cplx{std::ldexp(1.0, -squarings)};
    Mat2 sum, term;
    for (int k = 1; k <= 20; ++k) {
        term = term * x * cplx{1.0 / k};
        sum = sum + term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

}  // namespace

Mat2 expm_hermitian(const Mat2& h, double s, ExpMethod method) {
    return method == ExpMethod::Eigen ? expm_eigen(h, s) : expm_scaling_squaring(h, s);
}

Mat2 brute_force_evolve(const PulseSequence& sequence, double t, int substeps, ExpMethod method) {
    if (substeps < 1) substeps = 1;
    Mat2 u;
    const double T = sequence.period();
    std::vector<Mat2> full;
    full.reserve(sequence.size());
    for (const auto& step : sequence.steps()) {
        const Mat2 h = hamiltonian(step);
        const Mat2 piece = expm_hermitian(h, step.tau / substeps, method);
        Mat2 f;
        for (int k = 0; k < substeps; ++k) f = piece * f;
        full.push_back(f);
    }
    double elapsed = 0.0;
    const auto whole = static_cast<long long>(std::floor(t / T));
    for (long long k = 0; k < whole; ++k) {
        for (const auto& f : full) u = f * u;
        elapsed += T;
    }
    double rest = t - static_cast<double>(whole) * T;
    for (const auto& step : sequence.steps()) {
        if (rest <= 0.0) break;
        const double s = std::min(rest, step.tau);
        const Mat2 h = hamiltonian(step);
        const Mat2 piece = expm_hermitian(h, s / substeps, method);
        for (int k = 0; k < substeps; ++k) u = piece * u;
        rest -= s;
    }
    return u;
}

double trace_phase(const PulseSequence& sequence, double t) {
    const double T = sequence.period();
    const double whole = std::floor(t / T);
    double per_period = 0.0;
    for (const auto& step : sequence.steps()) per_period += 0.5 * step.delta * step.tau;
    double phase = whole * per_period;
    double rest = t - whole * T;
    for (const auto& step : sequence.steps()) {
        if (rest <= 0.0) break;
        const double s = std::min(rest, step.tau);
        phase += 0.5 * step.delta * s;
        rest -= s;
    }
    return phase;
}

Mat2 to_matrix(const PropagatorCoeffs& u) {
    Mat2 m;
    m(0, 0) = {u.A, u.B};
    m(0, 1) = {u.C, -u.D};
    m(1, 0) = {-u.C, -u.D};
    m(1, 1) = {u.A, -u.B};
    return m;
}

cplx numeric_fourier(std::span<const double> p, double t0, double dt, double omega) {
    if (p.size() < 2 || !(dt > 0.0)) throw Error(ErrorCode::Undersampled, "need at least two samples");
    if (omega != 0.0 && dt > 2.0 * kPi / (16.0 * std::abs(omega))) {
        throw Error(ErrorCode::Undersampled, "fewer than 16 samples per probe period");
    }
    cplx acc{0.0};
    const std::size_t n = p.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        acc += w * p[k] * std::polar(1.0, omega * (t0 + dt * static_cast<double>(k)));
    }
    const double length = dt * static_cast<double>(n - 1);
    return acc * (2.0 * dt / length);
}

namespace {

struct Maxima {
    std::vector<double> t, y;  // y = (2p - 1)^2 clipped
};

double fit_residual(const Maxima& mx, double w) {
    // Normal equations for y ~ c0 + a cos(2wt) + b sin(2wt).
    double g[3][3] = {}, r[3] = {};
    for (std::size_t i = 0; i < mx.t.size(); ++i) {
        const double f[3] = {1.0, std::cos(2.0 * w * mx.t[i]), std::sin(2.0 * w * mx.t[i])};
        for (int a = 0; a < 3; ++a) {
            r[a] += f[a] * mx.y[i];
            for (int b = 0; b < 3; ++b) g[a][b] += f[a] * f[b];
        }
    }
    // Gaussian elimination with partial pivoting.
    int idx[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int k = c + 1; k < 3; ++k)
            if (std::abs(g[idx[k]][c]) > std::abs(g[idx[piv]][c])) piv = k;
        std::swap(idx[c], idx[piv]);
        const double d = g[idx[c]][c];
        if (std::abs(d) < 1e-300) return 1e300;
        for (int k = c + 1; k < 3; ++k) {
            const double f = g[idx[k]][c] / d;
            for (int b = c; b < 3; ++b) g[idx[k]][b] -= f * g[idx[c]][b];
            r[idx[k]] -= f * r[idx[c]];
        }
    }
    double coef[3];
    for (int c = 2; c >= 0; --c) {
        double v = r[idx[c]];
        for (int b = c + 1; b < 3; ++b) v -= g[idx[c]][b] * coef[b];
        coef[c] = v / g[idx[c]][c];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < mx.t.size(); ++i) {
        const double m = coef[0] + coef[1] * std::cos(2.0 * w * mx.t[i]) + coef[2] * std::sin(2.0 * w * mx.t[i]);
        ss += (m - mx.y[i]) * (m - mx.y[i]);
    }
    return ss;
}

}  // namespace

Envelope envelope_extract(std::span<const double> p, double t0, double dt) {
    Envelope env;
    Maxima mx;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] > p[i - 1] && p[i] >= p[i + 1]) {
            const double t = t0 + dt * static_cast<double>(i);
            env.times.push_back(t);
            env.values.push_back(p[i]);
            const double u = std::clamp(2.0 * p[i] - 1.0, 0.0, 1.0);
            mx.t.push_back(t);
            mx.y.push_back(u * u);
        }
    }
    if (mx.t.size() < 3) throw Error(ErrorCode::NoEnvelope, "fewer than 3 envelope extrema");

    std::vector<double> gaps(mx.t.size() - 1);
    for (std::size_t i = 0; i + 1 < mx.t.size(); ++i) gaps[i] = mx.t[i + 1] - mx.t[i];
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double spacing = gaps[gaps.size() / 2];
    const double span = mx.t.back() - mx.t.front();
    const double w_lo = kPi / span;
    const double w_hi = kPi / (2.0 * spacing);
    if (!(w_hi > w_lo)) throw Error(ErrorCode::NoEnvelope, "envelope shorter than its carrier");

    constexpr int kGrid = 4000;
    const double step = (w_hi - w_lo) / (kGrid - 1);
    int best = 0;
    double best_r = fit_residual(mx, w_lo);
    for (int k = 1; k < kGrid; ++k) {
        const double r = fit_residual(mx, w_lo + step * k);
        if (r < best_r) {
            best_r = r;
            best = k;
        }
    }
    double a = w_lo + step * std::max(best - 1, 0);
    double b = w_lo + step * std::min(best + 1, kGrid - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = fit_residual(mx, x1), f2 = fit_residual(mx, x2);
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = fit_residual(mx, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = fit_residual(mx, x2);
        }
    }
    env.omega_b = 0.5 * (a + b);
    env.residual = std::sqrt(fit_residual(mx, env.omega_b) / static_cast<double>(mx.t.size()));
    return env;
}

}  // namespace tls::oracle
