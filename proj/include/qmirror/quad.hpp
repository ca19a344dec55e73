// quad.hpp — adaptive Gauss-Kronrod quadrature tuned for the model's
// integrands: narrow Lorentzian resonances of width gamma multiplied by
// oscillatory factors of period 2*pi/L.
//
// Hints seed the initial partition (panel edges at resonance_center +/-
// {1,3,10,30}*width and at multiples of the oscillation period); adaptive
// bisection with the embedded G7/K15 pair does the rest.  Results are
// deterministic for fixed inputs: the segment sum runs in ascending-interval
// order regardless of the refinement history.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qmirror::quad {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

template <std::size_t N>
struct BatchResult {
    std::array<double, N> value{};
    std::array<double, N> error_estimate{};
    long evaluations = 0;
};

// Pole/oscillation structure of an integrand.
struct IntegrandHints {
    std::vector<double> resonance_centers;
    double resonance_width = 0.0;
    std::optional<double> oscillation_period;
};

class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(std::string msg, double best, double err, long evals)
        : std::runtime_error(std::move(msg)),
          best_value(best), error_estimate(err), evaluations(evals) {}
    double best_value;
    double error_estimate;
    long evaluations;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1] (positive nodes).
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <std::size_t N>
struct Segment {
    double a = 0.0, b = 0.0;
    std::array<double, N> integral{};
    double err = 0.0;                 // max over components
    std::array<double, N> err_comp{};
};

// Apply G7/K15 to one segment of a batch integrand.  QUADPACK-style error
// damping via the mean-deviation resasc keeps estimates honest on
// unresolved oscillation.
template <typename F, std::size_t N>
inline Segment<N> gk15(F&& f, double a, double b) {
    Segment<N> s;
    s.a = a;
    s.b = b;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<std::array<double, N>, 15> fv{};
    // node order: index 0..6 negative side (xgk[0..6]), 7 center, 8..14 positive
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(center - half * xgk[static_cast<std::size_t>(j)]);
        fv[14 - j] = f(center + half * xgk[static_cast<std::size_t>(j)]);
    }
    fv[7] = f(center);

    for (std::size_t i = 0; i < N; ++i) {
        double resk = wgk[7] * fv[7][i];
        double resabs = std::abs(resk);
        double resg = wg[3] * fv[7][i];
        for (int j = 0; j < 7; ++j) {
            const double sum = fv[j][i] + fv[14 - j][i];
            resk += wgk[static_cast<std::size_t>(j)] * sum;
            resabs += wgk[static_cast<std::size_t>(j)] *
                      (std::abs(fv[j][i]) + std::abs(fv[14 - j][i]));
            if (j % 2 == 1) resg += wg[static_cast<std::size_t>(j / 2)] * sum;
        }
        const double mean = resk * 0.5;
        double resasc = wgk[7] * std::abs(fv[7][i] - mean);
        for (int j = 0; j < 7; ++j)
            resasc += wgk[static_cast<std::size_t>(j)] *
                      (std::abs(fv[j][i] - mean) + std::abs(fv[14 - j][i] - mean));
        resasc *= half;
        resabs *= half;

        double err = std::abs((resk - resg) * half);
        if (resasc != 0.0 && err != 0.0)
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        const double eps_floor = 50.0 * 2.2204460492503131e-16 * resabs;
        err = std::max(err, eps_floor);

        s.integral[i] = resk * half;
        s.err_comp[i] = err;
    }
    s.err = *std::max_element(s.err_comp.begin(), s.err_comp.end());
    return s;
}

inline std::vector<double> initial_breakpoints(double a, double b, const IntegrandHints& hints) {
    std::vector<double> pts{a, b};
    for (double c : hints.resonance_centers) {
        for (double k : {1.0, 3.0, 10.0, 30.0}) {
            const double w = hints.resonance_width * k;
            if (c - w > a && c - w < b) pts.push_back(c - w);
            if (c + w > a && c + w < b) pts.push_back(c + w);
        }
        if (c > a && c < b) pts.push_back(c);
    }
    if (hints.oscillation_period && *hints.oscillation_period > 0.0) {
        const double T = *hints.oscillation_period;
        const double n_osc = (b - a) / T;
        constexpr double max_panels = 2048.0;
        const double stride = (n_osc <= max_panels) ? T : T * std::ceil(n_osc / max_panels);
        for (double x = a + stride; x < b - 0.5 * stride; x += stride) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    const double min_sep = 1e-12 * (b - a);
    std::vector<double> out;
    out.reserve(pts.size());
    for (double x : pts)
        if (out.empty() || x - out.back() > min_sep) out.push_back(x);
    if (out.back() != b) out.back() = b;
    return out;
}

template <std::size_t N>
struct ErrOrder {
    bool operator()(const Segment<N>* lhs, const Segment<N>* rhs) const {
        return lhs->err < rhs->err;  // max-heap on error
    }
};

} // namespace detail

inline constexpr double default_abs_floor = 1e-14;
inline constexpr long default_max_evaluations = 2'000'000;

// Adaptive integration of a batch integrand f: double -> array<double, N>
// over [a, b].  Each component converges to
// |I_est - I| <= max(rel_tol*|I|, abs_floor).  Throws ConvergenceError
// (carrying the best estimate) if max_evals is exhausted first.
template <std::size_t N, typename F>
BatchResult<N> integrate_batch(F&& f, double a, double b, const IntegrandHints& hints,
                               double rel_tol, long max_evals = default_max_evaluations,
                               double abs_floor = default_abs_floor) {
    if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
    if (!(rel_tol >= 1e-13)) throw std::invalid_argument("integrate: rel_tol must be >= 1e-13");

    auto eval = [&f](double x) -> std::array<double, N> {
        if constexpr (N == 1) {
            if constexpr (std::is_convertible_v<decltype(f(x)), double>)
                return {static_cast<double>(f(x))};
            else
                return f(x);
        } else {
            return f(x);
        }
    };

    using Seg = detail::Segment<N>;
    std::vector<Seg> store;
    store.reserve(1024);
    long evals = 0;
    std::array<double, N> run_val{}, run_err{};  // running totals, refreshed on overflow risk

    auto add_seg = [&run_val, &run_err](const Seg& s, double sign) {
        for (std::size_t i = 0; i < N; ++i) {
            run_val[i] += sign * s.integral[i];
            run_err[i] += sign * s.err_comp[i];
        }
    };

    const auto pts = detail::initial_breakpoints(a, b, hints);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        store.push_back(detail::gk15<decltype(eval), N>(eval, pts[i], pts[i + 1]));
        add_seg(store.back(), 1.0);
        evals += 15;
    }

    auto converged = [rel_tol, abs_floor, &run_val, &run_err]() {
        for (std::size_t i = 0; i < N; ++i)
            if (run_err[i] > std::max(rel_tol * std::abs(run_val[i]), abs_floor)) return false;
        return true;
    };

    // worst-first bisection; a simple heap over segment indices
    auto cmp = [&store](std::size_t l, std::size_t r) { return store[l].err < store[r].err; };
    std::vector<std::size_t> heap(store.size());
    for (std::size_t i = 0; i < heap.size(); ++i) heap[i] = i;
    std::make_heap(heap.begin(), heap.end(), cmp);

    while (!converged()) {
        if (evals + 30 > max_evals || heap.empty()) {
            std::sort(store.begin(), store.end(),
                      [](const Seg& l, const Seg& r) { return l.a < r.a; });
            std::array<double, N> v{}, e{};
            for (const auto& s : store)
                for (std::size_t i = 0; i < N; ++i) {
                    v[i] += s.integral[i];
                    e[i] += s.err_comp[i];
                }
            double emax = 0.0;
            for (std::size_t i = 0; i < N; ++i) emax = std::max(emax, e[i]);
            throw ConvergenceError("integrate: evaluation budget exhausted before convergence",
                                   v[0], emax, evals);
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const std::size_t worst = heap.back();
        heap.pop_back();
        const double wa = store[worst].a, wb = store[worst].b;
        const double mid = 0.5 * (wa + wb);
        if (!(mid > wa && mid < wb)) continue;  // at float resolution; drop from heap
        add_seg(store[worst], -1.0);
        store[worst] = detail::gk15<decltype(eval), N>(eval, wa, mid);
        store.push_back(detail::gk15<decltype(eval), N>(eval, mid, wb));
        add_seg(store[worst], 1.0);
        add_seg(store.back(), 1.0);
        evals += 30;
        heap.push_back(worst);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(store.size() - 1);
        std::push_heap(heap.begin(), heap.end(), cmp);
        if (store.size() % 512 == 0) {  // refresh running totals: incremental drift
            run_val = {};
            run_err = {};
            for (const auto& s : store) add_seg(s, 1.0);
        }
    }

    std::sort(store.begin(), store.end(), [](const Seg& l, const Seg& r) { return l.a < r.a; });
    BatchResult<N> out;
    std::array<double, N> comp{};  // Kahan compensation
    for (const auto& s : store)
        for (std::size_t i = 0; i < N; ++i) {
            const double y = s.integral[i] - comp[i];
            const double t = out.value[i] + y;
            comp[i] = (t - out.value[i]) - y;
            out.value[i] = t;
            out.error_estimate[i] += s.err_comp[i];
        }
    out.evaluations = evals;
    return out;
}

// Scalar entry point.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const IntegrandHints& hints,
                           double rel_tol, long max_evals = default_max_evaluations,
                           double abs_floor = default_abs_floor) {
    auto wrap = [&f](double x) -> std::array<double, 1> { return {f(x)}; };
    const auto r = integrate_batch<1>(wrap, a, b, hints, rel_tol, max_evals, abs_floor);
    return {r.value[0], r.error_estimate[0], r.evaluations};
}

} // namespace qmirror::quad
