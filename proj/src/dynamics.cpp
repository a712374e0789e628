/*
 * Copyright 2026 The vsheet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vsheet/dynamics.hpp"

#include "vsheet/detail/circulation.hpp"
#include "vsheet/detail/nodes.hpp"
#include "vsheet/geometry.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace vsheet {

using detail::floor_div;
using detail::NodeView;
using detail::wrap_index;

std::string_view to_string(EvolutionScheme scheme) {
    switch (scheme) {
        case EvolutionScheme::lagrangian: return "lagrangian";
        case EvolutionScheme::arclength: return "arclength";
        case EvolutionScheme::circulation: return "circulation";
    }
    return "lagrangian";
}

EvolutionScheme evolution_scheme_from_string(std::string_view name) {
    if (name == "lagrangian") return EvolutionScheme::lagrangian;
    if (name == "arclength") return EvolutionScheme::arclength;
    if (name == "circulation") return EvolutionScheme::circulation;
    throw SheetError(ErrorKind::config, "unknown evolution scheme '" + std::string(name) + "'");
}

void check_config(const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw SheetError(ErrorKind::config, "dt must be positive");
    if (!(cfg.t_end > 0.0)) throw SheetError(ErrorKind::config, "t_end must be positive");
    if (cfg.remesh_every < 1) throw SheetError(ErrorKind::config, "remesh_every must be >= 1");
    if (cfg.output_every < 1) throw SheetError(ErrorKind::config, "output_every must be >= 1");
    if (cfg.markers < 0) throw SheetError(ErrorKind::config, "markers must be >= 0");
    if (cfg.fourier_filter_level < 0.0) throw SheetError(ErrorKind::config, "filter level must be >= 0");
}

namespace {

/// d/d eta at node j from the 5-point Lagrange stencil around it.
template <typename F>
Point2 stencil_derivative(const NodeView& v, Index j, F&& value) {
    const Index m = v.count();
    Index first = j - 2;
    if (!v.wraps()) first = std::clamp<Index>(first, 0, m - 5);
    std::array<double, 5> nodes{};
    for (int i = 0; i < 5; ++i) nodes[static_cast<std::size_t>(i)] = v.eta(first + i);
    Point2 d = Point2::Zero();
    for (int i = 0; i < 5; ++i) {
        double li = 0.0;
        for (int k = 0; k < 5; ++k) {
            if (k == i) continue;
            double term = 1.0 / (nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(k)]);
            for (int r = 0; r < 5; ++r) {
                if (r == i || r == k) continue;
                term *= (v.eta(j) - nodes[static_cast<std::size_t>(r)]) /
                        (nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(r)]);
            }
            li += term;
        }
        d += li * value(first + i);
    }
    return d;
}

/// Fourth-order d/dq on a uniform grid of M cells (M + 1 columns). Wrapping
/// data continue as f(j + M) = f(j) + shift.
Points2 uniform_derivative(const Points2& f, bool wraps, const Point2& shift) {
    const Index cols = f.cols();
    const Index cells = cols - 1;
    const double h = 1.0 / static_cast<double>(cells);
    Points2 d(2, cols);
    if (wraps) {
        auto at = [&](Index j) -> Point2 {
            const Index p = floor_div(j, cells);
            return f.col(j - p * cells) + static_cast<double>(p) * shift;
        };
        for (Index j = 0; j < cells; ++j)
            d.col(j) = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
        d.col(cells) = d.col(0);
        return d;
    }
    const Index M = cells;
    for (Index j = 2; j + 2 <= M; ++j)
        d.col(j) = (-f.col(j + 2) + 8.0 * f.col(j + 1) - 8.0 * f.col(j - 1) + f.col(j - 2)) / (12.0 * h);
    d.col(0) = (-25.0 * f.col(0) + 48.0 * f.col(1) - 36.0 * f.col(2) + 16.0 * f.col(3) - 3.0 * f.col(4)) / (12.0 * h);
    d.col(1) = (-3.0 * f.col(0) - 10.0 * f.col(1) + 18.0 * f.col(2) - 6.0 * f.col(3) + f.col(4)) / (12.0 * h);
    d.col(M) = (25.0 * f.col(M) - 48.0 * f.col(M - 1) + 36.0 * f.col(M - 2) - 16.0 * f.col(M - 3) + 3.0 * f.col(M - 4)) / (12.0 * h);
    d.col(M - 1) = (3.0 * f.col(M) + 10.0 * f.col(M - 1) - 18.0 * f.col(M - 2) + 6.0 * f.col(M - 3) - f.col(M - 4)) / (12.0 * h);
    return d;
}

/// Cubic interpolation of nodal values on the uniform grid at q in [0, 1].
double interp_uniform(const VectorXd& a, bool wraps, double q) {
    const Index cells = a.size() - 1;
    const double x = q * static_cast<double>(cells);
    Index j = static_cast<Index>(std::floor(x));
    Index first = j - 1;
    if (!wraps) {
        j = std::clamp<Index>(j, 0, cells - 1);
        first = std::clamp<Index>(j - 1, 0, cells - 3);
    }
    std::array<double, 4> nodes{};
    for (int i = 0; i < 4; ++i) nodes[static_cast<std::size_t>(i)] = static_cast<double>(first + i);
    const auto w = detail::lagrange4_weights(nodes, x);
    double out = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Index k = wraps ? wrap_index(first + i, cells) : first + i;
        out += w[static_cast<std::size_t>(i)] * a(k);
    }
    return out;
}

/// Arclength-scheme state on the fixed computational grid q_j = j / M.
/// `c` is the density with respect to q.
struct ArcState {
    double t = 0.0;
    Topology topology = Topology::open;
    Points2 X;
    VectorXd c;

    Index cells() const { return X.cols() - 1; }
    bool wraps() const { return topology != Topology::open; }
    Point2 shift() const {
        return topology == Topology::periodic ? Point2(X.col(cells()) - X.col(0)) : Point2::Zero();
    }
};

VectorXd uniform_weights(Index cols, bool wraps) {
    const double h = 1.0 / static_cast<double>(cols - 1);
    VectorXd w = VectorXd::Constant(cols, h);
    if (!wraps) {
        w(0) = 0.5 * h;
        w(cols - 1) = 0.5 * h;
    }
    return w;
}

/// Trapezoid weights in eta for all nodes; the wrap node repeats node 0.
VectorXd full_weights(const SheetState& s) {
    const VectorXd w = parameter_weights(s);
    VectorXd out(s.size());
    out.head(w.size()) = w;
    if (s.wraps()) out(s.size() - 1) = w(0);
    return out;
}

SheetState q_state(const ArcState& st) {
    SheetState s;
    s.t = st.t;
    s.topology = st.topology;
    s.param_kind = ParamKind::lagrangian;
    const Index cols = st.X.cols();
    s.eta = VectorXd::LinSpaced(cols, 0.0, 1.0);
    s.xi = st.X;
    s.sigma = st.c;
    return s;
}

ArcState from_arclength(const SheetState& s) {
    ArcState st;
    st.t = s.t;
    st.topology = s.topology;
    st.X = s.xi;
    const VectorXd we = full_weights(s);
    const VectorXd wq = uniform_weights(s.size(), s.wraps());
    st.c = s.sigma.cwiseProduct(we).cwiseQuotient(wq);
    return st;
}

SheetState to_arclength(const ArcState& st) {
    SheetState s;
    s.t = st.t;
    s.topology = st.topology;
    s.param_kind = ParamKind::arclength;
    s.xi = st.X;
    s.eta = VectorXd::Zero(st.X.cols());
    s.eta = arclength_table(s);
    const VectorXd we = full_weights(s);
    const VectorXd wq = uniform_weights(s.size(), s.wraps());
    s.sigma = st.c.cwiseProduct(wq).cwiseQuotient(we);
    if (s.wraps()) s.sigma(s.size() - 1) = s.sigma(0);
    return s;
}

struct ArcRates {
    Points2 dX;
    VectorXd dc;
    VectorXd dQ;
    double max_a = 0.0;
};

ArcRates arc_rates(const ArcState& st, const VectorXd& markers, const QuadratureSpec& q) {
    const Index cols = st.X.cols();
    const Index M = cols - 1;
    const bool wraps = st.wraps();
    const double h = 1.0 / static_cast<double>(M);
    const Points2 U = sheet_velocity(q_state(st), q).u;
    const Points2 Xq = uniform_derivative(st.X, wraps, st.shift());
    const Points2 Uq = uniform_derivative(U, wraps, Point2::Zero());

    // a = (cumulative integral of Xq . Uq - lambda q) / l^2 with a(0) = a(1) = 0.
    VectorXd f(cols);
    for (Index j = 0; j < cols; ++j) f(j) = Xq.col(j).dot(Uq.col(j));
    VectorXd F(cols);
    F(0) = 0.0;
    for (Index j = 1; j < cols; ++j) F(j) = F(j - 1) + 0.5 * h * (f(j - 1) + f(j));
    const double lambda = F(M);
    const VectorXd wq = uniform_weights(cols, wraps);
    double l2 = 0.0;
    for (Index j = 0; j < (wraps ? M : cols); ++j) l2 += (wraps ? h : wq(j)) * Xq.col(j).squaredNorm();
    VectorXd a(cols);
    for (Index j = 0; j < cols; ++j) a(j) = (F(j) - lambda * static_cast<double>(j) * h) / l2;
    a(0) = 0.0;
    a(M) = 0.0;

    ArcRates r;
    r.max_a = a.cwiseAbs().maxCoeff();
    r.dX.resize(2, cols);
    for (Index j = 0; j < cols; ++j) r.dX.col(j) = U.col(j) - a(j) * Xq.col(j);

    // Face fluxes a c at j + 1/2.
    auto cyc = [&](const VectorXd& v, Index j) { return v(wrap_index(j, M)); };
    VectorXd flux(M);
    for (Index j = 0; j < M; ++j) {
        double cf = 0.0;
        double af = 0.0;
        if (wraps) {
            cf = (-cyc(st.c, j - 1) + 7.0 * cyc(st.c, j) + 7.0 * cyc(st.c, j + 1) - cyc(st.c, j + 2)) / 12.0;
            af = (-cyc(a, j - 1) + 9.0 * cyc(a, j) + 9.0 * cyc(a, j + 1) - cyc(a, j + 2)) / 16.0;
        } else if (j == 0 || j == M - 1) {
            cf = 0.5 * (st.c(j) + st.c(j + 1));
            af = 0.5 * (a(j) + a(j + 1));
        } else {
            cf = (-st.c(j - 1) + 7.0 * st.c(j) + 7.0 * st.c(j + 1) - st.c(j + 2)) / 12.0;
            af = (-a(j - 1) + 9.0 * a(j) + 9.0 * a(j + 1) - a(j + 2)) / 16.0;
        }
        flux(j) = af * cf;
    }
    r.dc.resize(cols);
    if (wraps) {
        for (Index j = 0; j < M; ++j) r.dc(j) = -(flux(j) - flux(wrap_index(j - 1, M))) / h;
        r.dc(M) = r.dc(0);
        r.dX.col(M) = r.dX.col(0);
    } else {
        r.dc(0) = -flux(0) / (0.5 * h);
        r.dc(M) = flux(M - 1) / (0.5 * h);
        for (Index j = 1; j < M; ++j) r.dc(j) = -(flux(j) - flux(j - 1)) / h;
    }
    r.dQ.resize(markers.size());
    for (Index k = 0; k < markers.size(); ++k) r.dQ(k) = interp_uniform(a, wraps, markers(k));
    return r;
}

void check_cfl(double max_a, double dt, Index cells) {
    if (max_a * dt > 1.0 / static_cast<double>(cells)) {
        std::ostringstream os;
        os << "CFL violated: max|a| dt = " << max_a * dt << " exceeds the grid spacing";
        throw SheetError(ErrorKind::cfl_violation, os.str());
    }
}

/// RK4 step of the arclength scheme; markers move with dQ/dt = a(Q).
void arc_rk4(ArcState& st, VectorXd& markers, double dt, const QuadratureSpec& q) {
    auto shifted = [&](const ArcRates& k, double f) {
        ArcState s = st;
        s.X += f * dt * k.dX;
        s.c += f * dt * k.dc;
        return s;
    };
    const ArcRates k1 = arc_rates(st, markers, q);
    const ArcRates k2 = arc_rates(shifted(k1, 0.5), markers + 0.5 * dt * k1.dQ, q);
    const ArcRates k3 = arc_rates(shifted(k2, 0.5), markers + 0.5 * dt * k2.dQ, q);
    const ArcRates k4 = arc_rates(shifted(k3, 1.0), markers + dt * k3.dQ, q);
    check_cfl(std::max({k1.max_a, k2.max_a, k3.max_a, k4.max_a}), dt, st.cells());
    st.X += dt / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    st.c += dt / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
    markers += dt / 6.0 * (k1.dQ + 2.0 * k2.dQ + 2.0 * k3.dQ + k4.dQ);
    st.t += dt;
}

void lagrangian_rk4(SheetState& s, double dt, const QuadratureSpec& q) {
    auto rate = [&](const Points2& x) {
        SheetState tmp = s;
        tmp.xi = x;
        return sheet_velocity(tmp, q).u;
    };
    const Points2 k1 = rate(s.xi);
    const Points2 k2 = rate(s.xi + 0.5 * dt * k1);
    const Points2 k3 = rate(s.xi + 0.5 * dt * k2);
    const Points2 k4 = rate(s.xi + dt * k3);
    s.xi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s.t += dt;
}

/// Inverse of the node map produced by a remesh: old coordinate -> new one.
double remap_marker(const VectorXd& source, bool wraps, double q_old) {
    const Index cells = source.size() - 1;
    auto src = [&](Index k) {
        if (!wraps) return source(std::clamp<Index>(k, 0, cells));
        const Index p = floor_div(k, cells);
        return source(k - p * cells) + static_cast<double>(p);
    };
    const double* b = source.data();
    Index j = static_cast<Index>(std::upper_bound(b, b + cells + 1, q_old) - b) - 1;
    j = std::clamp<Index>(j, 0, cells - 1);
    Index first = j - 1;
    if (!wraps) first = std::clamp<Index>(first, 0, cells - 3);
    std::array<double, 4> nodes{};
    std::array<double, 4> vals{};
    for (int i = 0; i < 4; ++i) {
        nodes[static_cast<std::size_t>(i)] = static_cast<double>(first + i);
        vals[static_cast<std::size_t>(i)] = src(first + i);
    }
    double x = static_cast<double>(j) + (q_old - src(j)) / (src(j + 1) - src(j));
    for (int it = 0; it < 50; ++it) {
        const auto w = detail::lagrange4_weights(nodes, x);
        double val = 0.0;
        for (int i = 0; i < 4; ++i) val += w[static_cast<std::size_t>(i)] * vals[static_cast<std::size_t>(i)];
        const double eps = 1e-7;
        const auto w2 = detail::lagrange4_weights(nodes, x + eps);
        double val2 = 0.0;
        for (int i = 0; i < 4; ++i) val2 += w2[static_cast<std::size_t>(i)] * vals[static_cast<std::size_t>(i)];
        const double step = (val - q_old) / ((val2 - val) / eps);
        x -= step;
        if (std::abs(step) < 1e-15 * static_cast<double>(cells)) break;
    }
    return x / static_cast<double>(cells);
}

VectorXd marker_segments(const SheetState& s, const VectorXd& markers) {
    const Index k = markers.size();
    if (k == 0) return {};
    const detail::CumulativeCirculation gamma(s);
    VectorXd at(k);
    for (Index i = 0; i < k; ++i) at(i) = gamma(markers(i));
    const Index segs = s.wraps() ? k : k - 1;
    VectorXd out(std::max<Index>(segs, 0));
    for (Index i = 0; i + 1 < k; ++i) out(i) = at(i + 1) - at(i);
    if (s.wraps()) out(k - 1) = gamma.total() - (at(k - 1) - at(0));
    return out;
}

void check_self_approach(const SheetState& s, double fraction, double* min_distance) {
    const double d = min_nonadjacent_segment_distance(s);
    if (min_distance != nullptr) *min_distance = std::min(*min_distance, d);
    if (d < fraction * min_segment_length(s)) {
        std::ostringstream os;
        os << "sheet self-approach at t = " << s.t << " (distance " << d << ")";
        throw SheetError(ErrorKind::self_intersection, os.str());
    }
}

double chord_deviation(const SheetState& s) {
    const Index n = s.size();
    const double mean = total_length(s) / static_cast<double>(n - 1);
    double worst = 0.0;
    for (Index j = 0; j + 1 < n; ++j)
        worst = std::max(worst, std::abs((s.xi.col(j + 1) - s.xi.col(j)).norm() / mean - 1.0));
    return worst;
}

}  // namespace

VectorXd recover_tangential_coefficient(const SheetState& s, const Points2& U) {
    if (s.param_kind != ParamKind::arclength)
        throw SheetError(ErrorKind::invalid_state, "tangential coefficient needs an arclength state");
    if (U.cols() < s.distinct_nodes()) throw SheetError(ErrorKind::grid_mismatch, "velocity size mismatch");
    const NodeView v(s);
    const Index m = v.count();
    if (m < 5) throw SheetError(ErrorKind::invalid_state, "need at least 5 distinct nodes");
    auto u_at = [&](Index j) -> Point2 { return U.col(v.wraps() ? wrap_index(j, m) : j); };
    VectorXd f(m);
    for (Index j = 0; j < m; ++j) {
        const Point2 xs = stencil_derivative(v, j, [&](Index k) { return v.xi(k); });
        const Point2 us = stencil_derivative(v, j, u_at);
        f(j) = xs.dot(us);
    }
    VectorXd a(m);
    a(0) = 0.0;
    for (Index j = 1; j < m; ++j) a(j) = a(j - 1) + 0.5 * (s.eta(j) - s.eta(j - 1)) * (f(j - 1) + f(j));
    return a;
}

SheetState step(const SheetState& s, const EvolutionConfig& cfg) {
    check_config(cfg);
    if (cfg.scheme == EvolutionScheme::arclength) {
        if (s.param_kind != ParamKind::arclength)
            throw SheetError(ErrorKind::invalid_state, "arclength scheme needs an arclength state");
        ArcState st = from_arclength(s);
        VectorXd none;
        arc_rk4(st, none, cfg.dt, cfg.quadrature);
        return to_arclength(st);
    }
    if (cfg.scheme == EvolutionScheme::circulation && (s.sigma.array() - 1.0).abs().maxCoeff() > 1e-9)
        throw SheetError(ErrorKind::invalid_state, "circulation scheme needs sigma == 1");
    SheetState out = s;
    lagrangian_rk4(out, cfg.dt, cfg.quadrature);
    return out;
}

double total_circulation(const SheetState& s) {
    const VectorXd w = parameter_weights(s);
    return w.dot(s.sigma.head(w.size()));
}

VectorXd normal_defect(const SheetState& s, const SheetState& next, const Points2& U) {
    if (next.size() != s.size() || U.cols() < s.distinct_nodes())
        throw SheetError(ErrorKind::grid_mismatch, "states and velocity must share one grid");
    const double dt = next.t - s.t;
    if (!(dt > 0.0)) throw SheetError(ErrorKind::invalid_state, "states must be time ordered");
    const Points2 tau = unit_tangents(s);
    VectorXd b(tau.cols());
    for (Index j = 0; j < tau.cols(); ++j) {
        const Point2 xt = (next.xi.col(j) - s.xi.col(j)) / dt;
        const Point2 perp(-tau(1, j), tau(0, j));
        b(j) = perp.dot(U.col(j) - xt);
    }
    return b;
}

void fourier_filter(SheetState& s, double level) {
    if (!s.wraps() || !(level > 0.0)) return;
    const Index m = s.distinct_nodes();
    const Point2 shift = s.period_shift();
    Eigen::FFT<double> fft;
    for (int row = 0; row < 2; ++row) {
        std::vector<double> values(static_cast<std::size_t>(m));
        for (Index j = 0; j < m; ++j)
            values[static_cast<std::size_t>(j)] = s.xi(row, j) - shift(row) * static_cast<double>(j) / static_cast<double>(m);
        std::vector<std::complex<double>> spec;
        fft.fwd(spec, values);
        for (auto& c : spec)
            if (std::abs(c) / static_cast<double>(m) < level) c = 0.0;
        fft.inv(values, spec);
        for (Index j = 0; j < m; ++j)
            s.xi(row, j) = values[static_cast<std::size_t>(j)] + shift(row) * static_cast<double>(j) / static_cast<double>(m);
    }
    s.xi.col(m) = s.xi.col(0) + shift;
}

double suggested_dt(const SheetState& s, const QuadratureSpec& q) {
    const Points2 u = sheet_velocity(s, q).u.leftCols(s.distinct_nodes());
    const Point2 mean = u.rowwise().mean();
    const double umax = (u.colwise() - mean).colwise().norm().maxCoeff();
    const double h = min_segment_length(s);
    return umax > 0.0 ? 0.5 * h / umax : std::numeric_limits<double>::infinity();
}

SimulationResult simulate(const SheetState& initial, const EvolutionConfig& cfg) {
    check_config(cfg);
    validate(initial, ValidationTolerances{1e-3, 1e-9, 1e-9});
    check_quadrature(cfg.quadrature, initial);
    SimulationResult res;
    res.min_self_distance = std::numeric_limits<double>::infinity();
    const auto steps = std::max<Index>(1, static_cast<Index>(std::llround(cfg.t_end / cfg.dt)));
    const double dt = cfg.t_end / static_cast<double>(steps);
    const double t0 = initial.t;
    const bool filtering = cfg.fourier_filter_level > 0.0 && initial.wraps();
    res.filter_used = filtering;

    auto record = [&](const SheetState& s, const VectorXd& markers_eta) {
        res.trajectory.states.push_back(s);
        res.circulation.push_back(total_circulation(s));
        res.marker_positions.push_back(markers_eta);
        res.marker_circulation.push_back(marker_segments(s, markers_eta));
    };

    VectorXd markers(cfg.markers);
    for (int k = 0; k < cfg.markers; ++k) markers(k) = (k + 0.5) / cfg.markers;

    if (cfg.scheme == EvolutionScheme::arclength) {
        SheetState start = initial.param_kind == ParamKind::arclength ? initial
                                                                       : reparametrize_arclength(initial, initial.size());
        ArcState st = from_arclength(start);
        const bool wraps = st.wraps();
        record(q_state(st), markers);
        res.trajectory.states.back() = to_arclength(st);
        for (Index i = 1; i <= steps; ++i) {
            arc_rk4(st, markers, dt, cfg.quadrature);
            st.t = t0 + dt * static_cast<double>(i);
            if (filtering) {
                SheetState tmp = q_state(st);
                fourier_filter(tmp, cfg.fourier_filter_level);
                st.X = tmp.xi;
            }
            if (i % cfg.remesh_every == 0) {
                VectorXd source;
                const SheetState remeshed = reparametrize_arclength(q_state(st), st.X.cols(), &source);
                check_self_approach(remeshed, cfg.self_approach_fraction, &res.min_self_distance);
                res.remesh_chord_deviation = std::max(res.remesh_chord_deviation, chord_deviation(remeshed));
                for (Index k = 0; k < markers.size(); ++k) markers(k) = remap_marker(source, wraps, markers(k));
                st = from_arclength(remeshed);
                ++res.remeshes;
            }
            ++res.steps;
            if (i % cfg.output_every == 0 || i == steps) {
                const SheetState qs = q_state(st);
                res.circulation.push_back(total_circulation(qs));
                res.marker_positions.push_back(markers);
                res.marker_circulation.push_back(marker_segments(qs, markers));
                res.trajectory.states.push_back(to_arclength(st));
            }
        }
        return res;
    }

    if (cfg.scheme == EvolutionScheme::circulation && (initial.sigma.array() - 1.0).abs().maxCoeff() > 1e-9)
        throw SheetError(ErrorKind::invalid_state, "circulation scheme needs sigma == 1");
    SheetState s = initial;
    VectorXd markers_eta(markers.size());
    for (Index k = 0; k < markers.size(); ++k) markers_eta(k) = s.eta(0) + markers(k) * s.eta_period();
    record(s, markers_eta);
    for (Index i = 1; i <= steps; ++i) {
        lagrangian_rk4(s, dt, cfg.quadrature);
        s.t = t0 + dt * static_cast<double>(i);
        if (filtering) fourier_filter(s, cfg.fourier_filter_level);
        ++res.steps;
        if (i % cfg.output_every == 0 || i == steps) {
            check_self_approach(s, cfg.self_approach_fraction, &res.min_self_distance);
            record(s, markers_eta);
        }
    }
    return res;
}

}  // namespace vsheet
