// early.hpp — early-time entanglement dynamics: homogeneous and driven mode
// functions, the a-part/v-part correlator split, the reflection (iterated
// echo) series, and the covariance over (L, t).
//
// Frequency conventions: inside the mode coefficients M1/M2 and the
// e^{+/- i Omega t} factors, Omega means the underdamped frequency
// omega_tilde = sqrt(omega_r^2 - gamma^2), so that every closed form below
// solves its defining equation of motion exactly.

#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qmirror/core.hpp"
#include "qmirror/diag.hpp"
#include "qmirror/quad.hpp"
#include "qmirror/specfun.hpp"

namespace qmirror::early {

using cplx = std::complex<double>;
inline constexpr cplx iu{0.0, 1.0};

// Mode-function value together with its analytic time derivative.
struct ModeValue {
    cplx value;
    cplx deriv;
};

struct ModeCoefficients {
    cplx m1;  // 1 / (2(-w - i gamma + omega_tilde))
    cplx m2;  // 1 / (2(-w - i gamma - omega_tilde))
};

inline ModeCoefficients mode_coefficients(double omega, const SystemParams& p) {
    const double wt = p.omega_tilde();
    return {1.0 / (2.0 * (-omega - iu * p.gamma + wt)),
            1.0 / (2.0 * (-omega - iu * p.gamma - wt))};
}

// Homogeneous solution of (d^2/dt^2 + 2 gamma d/dt + omega_r^2) q = 0 with
// q(0) = 1, q'(0) = -i omega_r.
inline ModeValue q_homogeneous(double t, const SystemParams& p) {
    const double wt = p.omega_tilde();
    const cplx cp = 0.5 * (1.0 + (p.omega_r + iu * p.gamma) / wt);
    const cplx cm = 0.5 * (1.0 - (p.omega_r + iu * p.gamma) / wt);
    const cplx sm = -p.gamma - iu * wt;  // decay exponents
    const cplx sp = -p.gamma + iu * wt;
    const cplx em = std::exp(sm * t);
    const cplx ep = std::exp(sp * t);
    return {cp * em + cm * ep, cp * sm * em + cm * sp * ep};
}

// Retarded kernel of the damped oscillator:
// G_r(t) = theta(t) e^{-gamma t} sin(omega_tilde t)/omega_tilde, the
// solution of (d^2 + 2 gamma d + omega_r^2) G = delta(t).
inline double retarded_kernel(double t, const SystemParams& p) {
    if (t <= 0.0) return 0.0;
    const double wt = p.omega_tilde();
    return std::exp(-p.gamma * t) * std::sin(wt * t) / wt;
}

inline double retarded_kernel_deriv(double t, const SystemParams& p) {
    if (t < 0.0) return 0.0;
    const double wt = p.omega_tilde();
    return std::exp(-p.gamma * t) * (std::cos(wt * t) - p.gamma * std::sin(wt * t) / wt);
}

// Frequency-space brackets shared by the half-space and two-oscillator
// correlators: B_q(w, t) from the driven mode function and B_p = dB_q/dt.
inline std::pair<cplx, cplx> driven_brackets(double omega, double t, const SystemParams& p) {
    const double wt = p.omega_tilde();
    const auto [m1, m2] = mode_coefficients(omega, p);
    const cplx e_w = std::exp(-iu * omega * t);
    const cplx ep = std::exp(iu * wt * t);
    const cplx em = std::exp(-iu * wt * t);
    const double eg = std::exp(-p.gamma * t);
    const cplx bq = (m1 - m2) * e_w + (m2 * ep - m1 * em) * eg;
    const cplx bp = -iu * omega * (m1 - m2) * e_w +
                    ((iu * wt - p.gamma) * m2 * ep - (-iu * wt - p.gamma) * m1 * em) * eg;
    return {bq, bp};
}

// Zeroth-order driven mode function
//   q_+(t) = (lambda/(M omega_tilde)) * phase * B_q(omega, t),
// the solution of (d^2 + 2 gamma d + omega_r^2) q = (lambda/M) phase e^{-i w t}
// with q(0) = q'(0) = 0.  The sin(k3 L/2) factor enters as `k3_halfL_phase`
// so the angular reduction can reuse this routine.
inline ModeValue q_plus_zeroth(double t, double omega, double k3_halfL_phase,
                               const SystemParams& p) {
    const auto [bq, bp] = driven_brackets(omega, t, p);
    const double pref = p.lambda_coupling() / (p.mass * p.omega_tilde()) * k3_halfL_phase;
    return {pref * bq, pref * bp};
}

// a-part of the correlators (from the oscillator's own initial operators);
// independent of the mirror distance.
struct Correlators {
    double qq = 0.0;
    double pp = 0.0;
    double qp = 0.0;
};

inline Correlators correlators_a(double t, const SystemParams& p) {
    const auto qh = q_homogeneous(t, p);
    Correlators c;
    c.qq = std::norm(qh.value) / (2.0 * p.omega_r);
    c.pp = p.mass * p.mass * std::norm(qh.deriv) / (2.0 * p.omega_r);
    c.qp = p.mass / (2.0 * p.omega_r) * std::real(std::conj(qh.value) * qh.deriv);
    return c;
}

// Half-space spectral weight as printed in the source derivation:
// (omega/(8 pi^2)) (1 - sinc(omega L)).
inline double spectral_weight_half(double omega, double L) {
    return omega / (8.0 * pi * pi) * (1.0 - specfun::sinc(omega * L));
}

// Mode-normalization factor applied to every half-space / two-oscillator
// v-correlator.  Constraint: without it det V(t) falls below the Heisenberg
// floor 1/4 (the half-space mode functions carry a different normalization
// than free-space plane waves).
inline constexpr double mode_norm_factor = 2.0;

struct VCorrelatorOptions {
    double rel_tol = 1e-9;
    long max_evals = quad::default_max_evaluations;
};

namespace detail {

inline quad::IntegrandHints v_hints(double t, const SystemParams& p) {
    quad::IntegrandHints h;
    h.resonance_centers = {p.omega_tilde()};
    h.resonance_width = std::max(p.gamma, 1e-8);
    const double scale = std::max(p.distance, t);
    if (scale > 0.0) h.oscillation_period = 2.0 * pi / scale;
    return h;
}

} // namespace detail

// v-part of the correlators (induced by vacuum fluctuations of the
// half-space field).  qq/qp integrate to min(200 omega_r, cutoff); pp is
// cutoff-dependent by construction and integrates to the full cutoff.
inline Correlators correlators_v(double t, const SystemParams& p,
                                 const VCorrelatorOptions& opt = {}) {
    if (t < 0.0) throw std::invalid_argument("correlators_v: t must be >= 0");
    if (t == 0.0 || p.gamma == 0.0) return {};

    const double cutoff = p.cutoff_or_default();
    const double qq_limit = std::min(200.0 * p.omega_r, cutoff);
    const double upper = std::max(qq_limit, cutoff);
    const double lam = p.lambda_coupling();
    const double wt = p.omega_tilde();
    const double pref = mode_norm_factor * lam * lam / (p.mass * p.mass * wt * wt);
    const double L = p.distance;
    const double M = p.mass;

    auto f = [&](double w) -> std::array<double, 3> {
        const auto [bq, bp] = driven_brackets(w, t, p);
        const double wh = spectral_weight_half(w, L);
        std::array<double, 3> out{};
        if (w <= qq_limit) {
            out[0] = pref * wh * std::norm(bq);
            out[2] = M * pref * wh * std::real(std::conj(bq) * bp);
        }
        out[1] = M * M * pref * wh * std::norm(bp);
        return out;
    };

    auto hints = detail::v_hints(t, p);
    if (qq_limit < upper) hints.resonance_centers.push_back(qq_limit);  // seam panel edge

    const auto r = quad::integrate_batch<3>(f, 0.0, upper, hints, opt.rel_tol, opt.max_evals);
    return {r.value[0], r.value[1], r.value[2]};
}

struct CorrelatorSplit {
    Correlators a;
    Correlators v;

    CovarianceMatrix covariance() const {
        return {a.qq + v.qq, a.pp + v.pp, a.qp + v.qp};
    }
};

struct EarlyState {
    CorrelatorSplit split;
    CovarianceMatrix covariance;
    EntropyReport entropy;
};

// Covariance and entropy of the oscillator at time t (zeroth order in the
// reflection series).  Warns beyond t = 1/gamma where that truncation is no
// longer controlled.
inline EarlyState covariance_early(double t, const SystemParams& p,
                                   const VCorrelatorOptions& opt = {}) {
    if (t < 0.0) throw std::invalid_argument("covariance_early: t must be >= 0");
    if (p.gamma > 0.0 && t > 1.0 / p.gamma) {
        std::ostringstream os;
        os << "covariance_early: t = " << t << " exceeds 1/gamma = " << 1.0 / p.gamma
           << "; zeroth-order correlators are uncontrolled there";
        diag::warn(os.str());
    }
    EarlyState s;
    s.split.a = correlators_a(t, p);
    s.split.v = correlators_v(t, p, opt);
    s.covariance = s.split.covariance();
    s.entropy = linear_entropy(s.covariance);
    return s;
}

// ---------------------------------------------------------------------------
// Reflection series
// ---------------------------------------------------------------------------

// Default grid step for the echo convolutions: resolves both the carrier
// oscillation and the delay boundary.
inline double reflection_default_step(const SystemParams& p) {
    return std::min(2.0 * pi / (64.0 * p.omega_tilde()), p.distance / 64.0);
}

namespace detail {

// Iterated convolution engine: given samples of the previous order on a
// uniform grid with L an exact multiple of the step, produce the next order
//   q^(n)(t_j) = -(2 gamma / L) int_{nL}^{t_j} G_r(t_j - tau) q^(n-1)(tau - L) dtau
// by the trapezoid rule.
inline std::vector<cplx> echo_order(const std::vector<cplx>& prev, int order, double h,
                                    int shift, const SystemParams& p) {
    const std::size_t n = prev.size();
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    const double coeff = -2.0 * p.gamma / p.distance;
    std::vector<double> gr(n);
    for (std::size_t j = 0; j < n; ++j) gr[j] = retarded_kernel(static_cast<double>(j) * h, p);
    const std::size_t k0 = static_cast<std::size_t>(order) * static_cast<std::size_t>(shift);
    for (std::size_t j = k0 + 1; j < n; ++j) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = k0; k <= j; ++k) {
            const cplx term = gr[j - k] * prev[k - static_cast<std::size_t>(shift)];
            acc += (k == k0 || k == j) ? 0.5 * term : term;
        }
        out[j] = coeff * h * acc;
    }
    return out;
}

struct EchoGrid {
    double h;
    int shift;       // samples per delay L
    std::size_t n;   // samples covering [0, t]
};

inline EchoGrid echo_grid(double t, const SystemParams& p, double step) {
    if (step > p.distance / 10.0) {
        std::ostringstream os;
        os << "reflection_series: step " << step << " too coarse (must be <= L/10 = "
           << p.distance / 10.0 << ")";
        throw std::invalid_argument(os.str());
    }
    EchoGrid g;
    g.shift = static_cast<int>(std::ceil(p.distance / step));
    g.h = p.distance / g.shift;  // L is an exact multiple of h
    g.n = static_cast<std::size_t>(std::ceil(t / g.h)) + 2;
    return g;
}

inline cplx sample_linear(const std::vector<cplx>& v, double t, double h) {
    const double x = t / h;
    const auto j = static_cast<std::size_t>(x);
    if (j + 1 >= v.size()) return v.back();
    const double frac = x - static_cast<double>(j);
    return v[j] * (1.0 - frac) + v[j + 1] * frac;
}

} // namespace detail

// Echo corrections q^(1..n_max) to the homogeneous mode function at time t.
// Order n vanishes identically for t < n L (causality of the delay term).
inline std::vector<cplx> reflection_series(double t, int n_max, const SystemParams& p,
                                           double step = 0.0) {
    if (n_max < 1) throw std::invalid_argument("reflection_series: n_max must be >= 1");
    if (t < 0.0) throw std::invalid_argument("reflection_series: t must be >= 0");
    if (step == 0.0) step = reflection_default_step(p);
    const auto g = detail::echo_grid(t, p, step);

    std::vector<cplx> prev(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
        prev[j] = q_homogeneous(static_cast<double>(j) * g.h, p).value;

    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int order = 1; order <= n_max; ++order) {
        prev = detail::echo_order(prev, order, g.h, g.shift, p);
        out.push_back(t < order * p.distance ? cplx{0.0, 0.0}
                                             : detail::sample_linear(prev, t, g.h));
    }
    return out;
}

// Same echo recursion seeded with the driven mode function q_+^(0)(t, omega).
inline std::vector<cplx> reflection_series_driven(double t, int n_max, double omega,
                                                  double k3_halfL_phase, const SystemParams& p,
                                                  double step = 0.0) {
    if (n_max < 1) throw std::invalid_argument("reflection_series: n_max must be >= 1");
    if (t < 0.0) throw std::invalid_argument("reflection_series: t must be >= 0");
    if (step == 0.0) step = reflection_default_step(p);
    const auto g = detail::echo_grid(t, p, step);

    std::vector<cplx> prev(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
        prev[j] = q_plus_zeroth(static_cast<double>(j) * g.h, omega, k3_halfL_phase, p).value;

    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int order = 1; order <= n_max; ++order) {
        prev = detail::echo_order(prev, order, g.h, g.shift, p);
        out.push_back(t < order * p.distance ? cplx{0.0, 0.0}
                                             : detail::sample_linear(prev, t, g.h));
    }
    return out;
}

} // namespace qmirror::early
