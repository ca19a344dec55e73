// twin.hpp — comparison system: two inertial oscillators in free space with
// opposite-sign couplings.  Serves as the image-equivalence oracle for the
// half-space correlators and reproduces the distinct orders of the mirror
// correction (first order in the echo) versus the partner correction
// (second order).
//
// Normal-mode structure: the sum mode q_A + q_B obeys the half-space-type
// delay equation, the difference mode obeys it with the delay sign flipped.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include "qmirror/core.hpp"
#include "qmirror/early.hpp"
#include "qmirror/late.hpp"
#include "qmirror/quad.hpp"
#include "qmirror/specfun.hpp"

namespace qmirror::twin {

using cplx = std::complex<double>;
using late::iu;

enum class CouplingSign { same, opposite };

// ---------------------------------------------------------------------------
// Early-time v-correlators
// ---------------------------------------------------------------------------

struct TwinCorrelators {
    double self_qq = 0.0, self_pp = 0.0, self_qp = 0.0;   // per oscillator
    double cross_qq = 0.0, cross_pp = 0.0, cross_qp = 0.0;

    // Reduced covariance of one oscillator alone: the cross correlators do
    // not enter a single oscillator's density matrix.
    CovarianceMatrix reduced_single(const early::Correlators& a_part) const {
        return {a_part.qq + self_qq, a_part.pp + self_pp, a_part.qp + self_qp};
    }
};

// Vacuum-fluctuation correlators of the pair at time t.  Self correlators
// use the L -> 0 weight omega/(4 pi^2); cross correlators carry the
// sinc(omega L) signature and flip sign for opposite couplings.  Both carry
// the same mode-normalization factor as the half-space correlators, keeping
// the image-equivalence combination exact.
inline TwinCorrelators twin_correlators_v(double t, const SystemParams& p, CouplingSign sign,
                                          const early::VCorrelatorOptions& opt = {}) {
    if (t < 0.0) throw std::invalid_argument("twin_correlators_v: t must be >= 0");
    if (t == 0.0 || p.gamma == 0.0) return {};

    const double cutoff = p.cutoff_or_default();
    const double qq_limit = std::min(200.0 * p.omega_r, cutoff);
    const double upper = std::max(qq_limit, cutoff);
    const double lam = p.lambda_coupling();
    const double wt = p.omega_tilde();
    const double pref =
        early::mode_norm_factor * lam * lam / (p.mass * p.mass * wt * wt);
    const double L = p.distance;
    const double M = p.mass;
    const double sgn = sign == CouplingSign::opposite ? -1.0 : 1.0;

    auto f = [&](double w) -> std::array<double, 6> {
        const auto [bq, bp] = early::driven_brackets(w, t, p);
        const double w_self = w / (4.0 * pi * pi);
        const double w_cross = sgn * w_self * specfun::sinc(w * L);
        const double nq = std::norm(bq);
        const double np = std::norm(bp);
        const double xq = std::real(std::conj(bq) * bp);
        std::array<double, 6> out{};
        if (w <= qq_limit) {
            out[0] = pref * w_self * nq;
            out[2] = M * pref * w_self * xq;
            out[3] = pref * w_cross * nq;
            out[5] = M * pref * w_cross * xq;
        }
        out[1] = M * M * pref * w_self * np;
        out[4] = M * M * pref * w_cross * np;
        return out;
    };

    auto hints = early::detail::v_hints(t, p);
    if (qq_limit < upper) hints.resonance_centers.push_back(qq_limit);

    const auto r = quad::integrate_batch<6>(f, 0.0, upper, hints, opt.rel_tol, opt.max_evals);
    TwinCorrelators c;
    c.self_qq = r.value[0];
    c.self_pp = r.value[1];
    c.self_qp = r.value[2];
    c.cross_qq = r.value[3];
    c.cross_pp = r.value[4];
    c.cross_qp = r.value[5];
    return c;
}

// ---------------------------------------------------------------------------
// Late-time stationary machinery (normal modes)
// ---------------------------------------------------------------------------

// Exact stationary cross correlator <{Q_A, Q_B}>/2 of the opposite-coupled
// pair via the normal-mode responses:
//   G_AB = (G_sum - G_diff)/2,  cross = (1/pi) int Im[G_AB] dw
// with G_sum the half-space-type response and G_diff its delay-sign flip.
inline double twin_cross_late(const SystemParams& p, const late::LateOptions& opt = {}) {
    const double cutoff = p.cutoff_or_default();
    auto f = [&p](double w) {
        const cplx d = late::inverse_response_free(w, p);
        const cplx k = late::image_term(w, p);
        return std::imag(-k / (d * d - k * k));  // (1/(d+k) - 1/(d-k))/2
    };
    const auto r = quad::integrate(f, 0.0, cutoff, late::detail::late_hints(p, late::Geometry::half_space),
                                   opt.rel_tol, opt.max_evals);
    return r.value / (pi * p.mass);
}

// Exact stationary correction to one oscillator's self correlator relative
// to a single free oscillator: (G_AA - G_free) integrated, second order in
// the mutual influence.
inline double twin_self_correction_late(const SystemParams& p, const late::LateOptions& opt = {}) {
    const double cutoff = p.cutoff_or_default();
    auto f = [&p](double w) {
        const cplx d = late::inverse_response_free(w, p);
        const cplx k = late::image_term(w, p);
        return std::imag(k * k / (d * (d * d - k * k)));
    };
    const auto r = quad::integrate(f, 0.0, cutoff, late::detail::late_hints(p, late::Geometry::half_space),
                                   opt.rel_tol, opt.max_evals);
    return r.value / (pi * p.mass);
}

// Lowest order in the mutual influence: the pieces whose magnitudes carry
// the advertised 1/L (cross, shared-vacuum) and 1/L^2 (self, single-echo)
// envelopes.  The integrands keep the full resonance structure |H0|^2.
inline double twin_cross_lowest_order(const SystemParams& p, const late::LateOptions& opt = {}) {
    const double cutoff = std::min(p.cutoff_or_default(), 200.0 * p.omega_r);
    auto f = [&p](double w) {
        const cplx h0 = 1.0 / late::inverse_response_free(w, p);
        return w * specfun::sinc(w * p.distance) * std::norm(h0);
    };
    const auto r = quad::integrate(f, 0.0, cutoff, late::detail::late_hints(p, late::Geometry::half_space),
                                   opt.rel_tol, opt.max_evals);
    return -(2.0 * p.gamma / (pi * p.mass)) * r.value;
}

inline double twin_self_correction_lowest_order(const SystemParams& p,
                                                const late::LateOptions& opt = {}) {
    const double cutoff = std::min(p.cutoff_or_default(), 200.0 * p.omega_r);
    auto f = [&p](double w) {
        const cplx h0 = 1.0 / late::inverse_response_free(w, p);
        const cplx k = late::image_term(w, p);
        return 2.0 * w * specfun::sinc(w * p.distance) * std::real(k * h0) * std::norm(h0);
    };
    const auto r = quad::integrate(f, 0.0, cutoff, late::detail::late_hints(p, late::Geometry::half_space),
                                   opt.rel_tol, opt.max_evals);
    return (2.0 * p.gamma / (pi * p.mass)) * r.value;
}

// ---------------------------------------------------------------------------
// Scaling fit
// ---------------------------------------------------------------------------

struct ScalingFit {
    double cross_exponent = 0.0;
    double self_exponent = 0.0;
    std::vector<double> sampled_L;       // carrier-extremum points actually used
    std::vector<double> cross_values;
    std::vector<double> self_values;
};

namespace detail {

// Ordinary least squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12 * (1.0 + sxx * n))
        throw std::runtime_error("twin_late_scaling: degenerate fit (L grid too narrow)");
    return (n * sxy - sx * sy) / denom;
}

} // namespace detail

// Fits the log-log L-exponents of the lowest-order cross correlator and
// self-correlator correction.  Both quantities ride the spatial carrier
// sin(omega_tilde L); each requested L is snapped to the nearest carrier
// extremum omega_tilde L = (k + 1/2) pi so the fit sees the envelope rather
// than the oscillation.
inline ScalingFit twin_late_scaling(const SystemParams& p, const std::vector<double>& l_grid,
                                    const late::LateOptions& opt = {}) {
    if (l_grid.size() < 4)
        throw std::invalid_argument("twin_late_scaling: need at least 4 grid points");
    const double wt = p.omega_tilde();

    std::set<long> ks;
    for (double L : l_grid) {
        if (!(L > 0.0)) throw std::invalid_argument("twin_late_scaling: L must be > 0");
        const long k = std::lround(wt * L / pi - 0.5);
        if (k >= 0) ks.insert(k);
    }
    if (ks.size() < 4)
        throw std::runtime_error("twin_late_scaling: degenerate fit (fewer than 4 distinct "
                                 "carrier extrema in the L grid)");

    ScalingFit fit;
    std::vector<double> lx, lc, ls;
    for (long k : ks) {
        SystemParams q = p;
        q.distance = (static_cast<double>(k) + 0.5) * pi / wt;
        const double c = twin_cross_lowest_order(q, opt);
        const double s = twin_self_correction_lowest_order(q, opt);
        fit.sampled_L.push_back(q.distance);
        fit.cross_values.push_back(c);
        fit.self_values.push_back(s);
        lx.push_back(std::log(q.distance));
        lc.push_back(std::log(std::abs(c)));
        ls.push_back(std::log(std::abs(s)));
    }
    fit.cross_exponent = detail::ols_slope(lx, lc);
    fit.self_exponent = detail::ols_slope(lx, ls);
    return fit;
}

// ---------------------------------------------------------------------------
// First-order coincidence
// ---------------------------------------------------------------------------

struct FirstOrderComparison {
    double dvqq_closed = 0.0;     // closed-form mirror correction
    double dvqq_integral = 0.0;   // its defining first-order integral
    double cross_late = 0.0;      // exact stationary pair cross correlator
};

// The first-order mirror correction to V_QQ and the late-time cross
// correlator of the opposite-coupled pair are numerically identical objects
// attached to different observables: the cross correlator never enters the
// reduced state of either single oscillator.
inline FirstOrderComparison first_order_free_correction(const SystemParams& p,
                                                        const late::LateOptions& opt = {}) {
    FirstOrderComparison c;
    c.dvqq_closed = late::delta_v(p).dvqq;
    c.dvqq_integral = late::delta_v_integral(p, p.cutoff_or_default(), opt).dvqq;
    c.cross_late = twin_cross_late(p, opt);
    return c;
}

} // namespace qmirror::twin
