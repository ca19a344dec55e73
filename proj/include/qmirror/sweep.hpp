// sweep.hpp — parameter sweeps behind the CLI: rectangular (L, t) early-time
// grids, late-time L and gamma sweeps, twin scaling runs, and deterministic
// CSV/JSON emission.
//
// Grid points are evaluated in parallel; rows are assembled in index order,
// so identical sweep specifications produce byte-identical output.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qmirror/core.hpp"
#include "qmirror/early.hpp"
#include "qmirror/late.hpp"
#include "qmirror/twin.hpp"
#include "qmirror/version.hpp"

namespace qmirror::sweep {

// ---------------------------------------------------------------------------
// Axis ranges
// ---------------------------------------------------------------------------

struct Range {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    bool log_spaced = false;

    std::vector<double> values() const {
        if (count < 2) throw std::invalid_argument("range: count must be >= 2 per swept axis");
        if (log_spaced && !(start > 0.0 && stop > 0.0))
            throw std::invalid_argument("range: log spacing requires positive endpoints");
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double f = static_cast<double>(i) / (count - 1);
            v[static_cast<std::size_t>(i)] =
                log_spaced ? start * std::pow(stop / start, f) : start + (stop - start) * f;
        }
        return v;
    }
};

// Parses "a:b:n" or "a:b:n:log".
inline Range parse_range(const std::string& text) {
    Range r;
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() < 3 || parts.size() > 4)
        throw std::invalid_argument("range: expected a:b:n or a:b:n:log, got '" + text + "'");
    try {
        r.start = std::stod(parts[0]);
        r.stop = std::stod(parts[1]);
        r.count = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw std::invalid_argument("range: could not parse '" + text + "'");
    }
    if (parts.size() == 4) {
        if (parts[3] != "log")
            throw std::invalid_argument("range: trailing qualifier must be 'log'");
        r.log_spaced = true;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Sweep specification and table
// ---------------------------------------------------------------------------

enum class Mode { early_grid, late_L, late_gamma, twin_scaling };

enum class Format { csv, json };

struct SweepSpec {
    Mode mode = Mode::early_grid;
    SystemParams params;
    std::optional<Range> l_range;
    std::optional<Range> t_range;
    std::optional<Range> gamma_range;
    double rel_tol = 1e-9;
    Format format = Format::csv;
    std::string out;  // empty -> stdout
};

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_meta(const std::string& k, double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        metadata.emplace_back(k, buf);
    }
    void add_meta(const std::string& k, const std::string& v) { metadata.emplace_back(k, v); }
};

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);  // 12 significant digits
    return buf;
}

inline void common_metadata(SweepTable& t, const SweepSpec& spec, const char* mode_name) {
    t.add_meta("generator", std::string("qmirror ") + version_string);
    t.add_meta("mode", mode_name);
    t.add_meta("mass", spec.params.mass);
    t.add_meta("omega_r", spec.params.omega_r);
    t.add_meta("gamma", spec.params.gamma);
    t.add_meta("L", spec.params.distance);
    t.add_meta("cutoff", spec.params.cutoff_or_default());
    t.add_meta("rel_tol", spec.rel_tol);
    const auto put_range = [&t](const char* name, const std::optional<Range>& r) {
        if (!r) return;
        std::ostringstream os;
        os << r->start << ":" << r->stop << ":" << r->count << (r->log_spaced ? ":log" : "");
        t.add_meta(name, os.str());
    };
    put_range("L_range", spec.l_range);
    put_range("t_range", spec.t_range);
    put_range("gamma_range", spec.gamma_range);
}

// Deterministic parallel map: results land in index order.
template <typename Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

// Early-time (L, t) grid: one row per grid point with the zeroth-order
// covariance and entropy.
inline SweepTable run_early_grid(const SweepSpec& spec) {
    if (!spec.l_range || !spec.t_range)
        throw std::invalid_argument("early grid: both --L-range and --t-range are required");
    const auto ls = spec.l_range->values();
    const auto ts = spec.t_range->values();

    SweepTable table;
    detail::common_metadata(table, spec, "early-grid");
    table.columns = {"L", "t", "S_L", "purity", "vqq", "vpp", "vqp"};
    table.rows.resize(ls.size() * ts.size());

    early::VCorrelatorOptions opt;
    opt.rel_tol = spec.rel_tol;
    detail::parallel_for(table.rows.size(), [&](std::size_t idx) {
        const double L = ls[idx / ts.size()];
        const double t = ts[idx % ts.size()];
        SystemParams p = spec.params;
        p.distance = L;
        const auto st = early::covariance_early(t, p, opt);
        table.rows[idx] = {L, t, st.entropy.linear_entropy, st.entropy.purity,
                           st.covariance.vqq, st.covariance.vpp, st.covariance.vqp};
    });
    return table;
}

// Late-time sweep over L (mode late_L) or gamma (mode late_gamma).
inline SweepTable run_late_sweep(const SweepSpec& spec) {
    const bool over_gamma = spec.mode == Mode::late_gamma;
    if (over_gamma && !spec.gamma_range)
        throw std::invalid_argument("late sweep: --gamma-range is required in gamma mode");
    if (!over_gamma && !spec.l_range)
        throw std::invalid_argument("late sweep: --L-range is required");

    const auto xs = over_gamma ? spec.gamma_range->values() : spec.l_range->values();

    SweepTable table;
    detail::common_metadata(table, spec, over_gamma ? "late-gamma" : "late-L");
    table.columns = {over_gamma ? "gamma" : "L", "S_L_free", "S_L_half_exact",
                     "delta_S_linear", "dvqq", "dvpp", "validity_ok"};
    table.rows.resize(xs.size());

    late::LateOptions opt;
    opt.rel_tol = spec.rel_tol;
    detail::parallel_for(xs.size(), [&](std::size_t idx) {
        SystemParams p = spec.params;
        if (over_gamma)
            p.gamma = xs[idx];
        else
            p.distance = xs[idx];
        p.validate();
        const auto s_free = late::s_late(p, late::Geometry::free_space, opt);
        const auto s_half = late::s_late(p, late::Geometry::half_space, opt);
        const auto dv = late::delta_v(p);
        table.rows[idx] = {xs[idx],
                           s_free.linear_entropy,
                           s_half.linear_entropy,
                           late::delta_s_linear(p),
                           dv.dvqq,
                           dv.dvpp,
                           late::half_space_perturbative_valid(p) ? 1.0 : 0.0};
    });
    return table;
}

// Twin scaling run: lowest-order late-time pair quantities at carrier
// extrema, plus the fitted exponents in the metadata.
inline SweepTable run_twin_scaling(const SweepSpec& spec) {
    if (!spec.l_range) throw std::invalid_argument("twin scaling: --L-range is required");
    late::LateOptions opt;
    opt.rel_tol = spec.rel_tol;
    const auto fit = twin::twin_late_scaling(spec.params, spec.l_range->values(), opt);

    SweepTable table;
    detail::common_metadata(table, spec, "twin-scaling");
    table.columns = {"L", "cross_qq", "self_correction"};
    for (std::size_t i = 0; i < fit.sampled_L.size(); ++i)
        table.rows.push_back({fit.sampled_L[i], fit.cross_values[i], fit.self_values[i]});
    table.add_meta("cross_exponent", fit.cross_exponent);
    table.add_meta("self_exponent", fit.self_exponent);
    return table;
}

inline SweepTable run(const SweepSpec& spec) {
    switch (spec.mode) {
        case Mode::early_grid: return run_early_grid(spec);
        case Mode::late_L:
        case Mode::late_gamma: return run_late_sweep(spec);
        case Mode::twin_scaling: return run_twin_scaling(spec);
    }
    throw std::logic_error("run: unknown sweep mode");
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

// CSV dialect: '#'-prefixed metadata lines, comma separation, scientific
// notation with 12 significant digits.
inline void write_csv(const SweepTable& t, std::ostream& os) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << detail::format_value(row[i]) << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

inline void write_json(const SweepTable& t, std::ostream& os) {
    os << "{\n  \"metadata\": {";
    for (std::size_t i = 0; i < t.metadata.size(); ++i)
        os << (i ? ", " : "") << "\"" << t.metadata[i].first << "\": \""
           << t.metadata[i].second << "\"";
    os << "},\n  \"columns\": [";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? ", " : "") << "\"" << t.columns[i] << "\"";
    os << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? ",\n    " : "\n    ") << "[";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            os << (i ? ", " : "") << detail::format_value(t.rows[r][i]);
        os << "]";
    }
    os << "\n  ]\n}\n";
}

inline std::string serialize(const SweepTable& t, Format fmt) {
    std::ostringstream os;
    if (fmt == Format::csv)
        write_csv(t, os);
    else
        write_json(t, os);
    return os.str();
}

} // namespace qmirror::sweep
