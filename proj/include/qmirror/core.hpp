// core.hpp — system parameters, covariance matrices, and Gaussian-state
// entanglement measures for a single oscillator mode.
//
// Conventions: hbar = c = 1 throughout; the oscillator mass defaults to 1.

#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qmirror/diag.hpp"

namespace qmirror {

inline constexpr double pi = 3.14159265358979323846;

// Tolerance above which purity > 1 is treated as a hard error rather than
// quadrature round-off.
inline constexpr double purity_tolerance = 1e-9;

// ---------------------------------------------------------------------------
// SystemParams
// ---------------------------------------------------------------------------

// Physical constants of the oscillator-field model.
//
// gamma is the canonical coupling input; the bilinear coupling constant
// lambda = sqrt(8*pi*mass*gamma) is derived.  distance is the
// oscillator-to-image distance L (the mirror plane sits at L/2).
struct SystemParams {
    double mass = 1.0;      // M_Q
    double omega_r = 5.0;   // renormalized frequency
    double gamma = 0.02;    // damping constant, = lambda^2/(8 pi M_Q)
    double distance = 2.0;  // L
    double cutoff = 0.0;    // field frequency cutoff; 0 -> default 1e4*omega_r

    // Underdamped oscillation frequency.  The defining relation is
    // omega_tilde^2 = omega_r^2 - gamma^2 (the squared form keeps q^(h)
    // an exact solution of the damped equation of motion).
    double omega_tilde() const { return std::sqrt(omega_r * omega_r - gamma * gamma); }

    double lambda_coupling() const { return std::sqrt(8.0 * pi * mass * gamma); }

    double cutoff_or_default() const { return cutoff > 0.0 ? cutoff : 1e4 * omega_r; }

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("SystemParams: mass must be > 0");
        if (!(omega_r > 0.0)) throw std::invalid_argument("SystemParams: omega_r must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("SystemParams: gamma must be >= 0");
        if (!(gamma < omega_r))
            throw std::invalid_argument("SystemParams: underdamped regime requires gamma < omega_r");
        if (!(distance > 0.0)) throw std::invalid_argument("SystemParams: distance must be > 0");
        if (cutoff != 0.0 && !(cutoff > 0.0))
            throw std::invalid_argument("SystemParams: cutoff must be > 0");
    }
};

inline SystemParams make_params(double gamma, double omega_r, double mass = 1.0,
                                double distance = 2.0, double cutoff = 0.0) {
    SystemParams p;
    p.gamma = gamma;
    p.omega_r = omega_r;
    p.mass = mass;
    p.distance = distance;
    p.cutoff = cutoff;
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// CovarianceMatrix
// ---------------------------------------------------------------------------

// Symmetric second moments <{Q,Q}>/2, <{P,P}>/2, <{Q,P}>/2 of the
// oscillator's Gaussian state.  A physical state has det >= 1/4.
struct CovarianceMatrix {
    double vqq = 0.0;
    double vpp = 0.0;
    double vqp = 0.0;

    double det() const { return vqq * vpp - vqp * vqp; }
};

// ---------------------------------------------------------------------------
// Entanglement measures
// ---------------------------------------------------------------------------

struct EntropyReport {
    double purity = 1.0;
    double linear_entropy = 0.0;   // 1 - purity, exactly
    double von_neumann = 0.0;
};

// Purity P = 1/(2 sqrt(det V)).  Values marginally above 1 (quadrature
// round-off on a pure state) are warned about and returned raw.
inline double purity(const CovarianceMatrix& v) {
    const double d = v.det();
    if (!(d > 0.0)) {
        std::ostringstream os;
        os << "purity: covariance matrix has non-positive determinant (vqq=" << v.vqq
           << ", vpp=" << v.vpp << ", vqp=" << v.vqp << ", det=" << d << ")";
        throw std::domain_error(os.str());
    }
    const double p = 1.0 / (2.0 * std::sqrt(d));
    if (p > 1.0 + purity_tolerance) {
        std::ostringstream os;
        os << "purity = " << p << " exceeds 1 beyond tolerance " << purity_tolerance
           << " (det = " << d << ")";
        diag::warn(os.str());
    }
    return p;
}

// Von Neumann entropy of a single-mode Gaussian state of purity P.
// S_nu = ((1-P)/(2P)) ln((1+P)/(1-P)) - ln(2P/(1+P)); the P -> 1 limit is 0.
inline double von_neumann_entropy(double p) {
    if (!(p > 0.0) || p > 1.0 + purity_tolerance)
        throw std::domain_error("von_neumann_entropy: purity must lie in (0, 1]");
    if (p >= 1.0) return 0.0;
    return (1.0 - p) / (2.0 * p) * std::log((1.0 + p) / (1.0 - p)) -
           std::log(2.0 * p / (1.0 + p));
}

// Fills all three measures from one covariance matrix.
inline EntropyReport linear_entropy(const CovarianceMatrix& v) {
    EntropyReport r;
    r.purity = purity(v);
    r.linear_entropy = 1.0 - r.purity;
    r.von_neumann = von_neumann_entropy(std::min(r.purity, 1.0));
    return r;
}

} // namespace qmirror
