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

#include "vsheet/kernels.hpp"

#include "vsheet/detail/nodes.hpp"
#include "vsheet/detail/parallel.hpp"
#include "vsheet/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace vsheet {

using detail::NodeView;

Point2 periodic_remainder(const Point2& x, double period) {
    const std::complex<double> w(kPi * x.x() / period, kPi * x.y() / period);
    if (std::abs(w) < 0.2) {
        const std::complex<double> w2 = w * w;
        // Tail of the Laurent series of cot beyond 1/w.
        const std::complex<double> series =
            w * (1.0 / 3.0 +
                 w2 * (1.0 / 45.0 +
                       w2 * (2.0 / 945.0 + w2 * (1.0 / 4725.0 + w2 * (2.0 / 93555.0 + w2 * (1382.0 / 638512875.0))))));
        const std::complex<double> uv = std::complex<double>(0.0, 1.0) / (2.0 * period) * series;
        return {uv.real(), -uv.imag()};
    }
    return periodic_kernel<double>(x, period) - biot_savart_kernel<double>(x);
}

std::string_view to_string(PvScheme scheme) {
    switch (scheme) {
        case PvScheme::automatic: return "automatic";
        case PvScheme::epsilon_cutoff: return "epsilon_cutoff";
        case PvScheme::alternate_point: return "alternate_point";
        case PvScheme::blob: return "blob";
    }
    return "automatic";
}

PvScheme pv_scheme_from_string(std::string_view name) {
    if (name == "automatic" || name == "auto") return PvScheme::automatic;
    if (name == "epsilon_cutoff") return PvScheme::epsilon_cutoff;
    if (name == "alternate_point") return PvScheme::alternate_point;
    if (name == "blob") return PvScheme::blob;
    throw SheetError(ErrorKind::config, "unknown quadrature scheme '" + std::string(name) + "'");
}

PvScheme resolve_scheme(const QuadratureSpec& q, const SheetState& s) {
    (void)s;
    if (q.scheme != PvScheme::automatic) return q.scheme;
    return PvScheme::alternate_point;
}

void check_quadrature(const QuadratureSpec& q, const SheetState& s) {
    const PvScheme scheme = resolve_scheme(q, s);
    if (scheme == PvScheme::epsilon_cutoff && !(q.epsilon > 0.0))
        throw SheetError(ErrorKind::config, "epsilon_cutoff needs epsilon > 0");
    if (scheme == PvScheme::blob && !(q.delta > 0.0)) throw SheetError(ErrorKind::config, "blob needs delta > 0");
    if (q.refine_factor < 1) throw SheetError(ErrorKind::config, "refine_factor must be >= 1");
    if (scheme == PvScheme::alternate_point && s.wraps()) {
        if (s.distinct_nodes() % 2 != 0)
            throw SheetError(ErrorKind::unsupported, "alternate_point needs an even number of distinct nodes");
    }
}

namespace {

struct Samples {
    Points2 x;
    VectorXd weight;  // sigma * d eta
    std::vector<Index> cell;
    double min_gap = std::numeric_limits<double>::infinity();
};

/// Midpoints of `factor` subcells per cell, sampled with cubic interpolation.
Samples build_samples(const NodeView& v, int factor) {
    const SheetState& s = v.state();
    const Index cells = v.wraps() ? v.count() : s.size() - 1;
    Samples out;
    out.x.resize(2, cells * factor);
    out.weight.resize(cells * factor);
    out.cell.resize(static_cast<std::size_t>(cells * factor));
    for (Index j = 0; j < cells; ++j) {
        const double h = v.eta(j + 1) - v.eta(j);
        for (int k = 0; k < factor; ++k) {
            const Index m = j * factor + k;
            const double e = v.eta(j) + (k + 0.5) * h / factor;
            const auto smp = detail::sample_in_cell<6>(v, j, e);
            out.x.col(m) = smp.xi;
            out.weight(m) = smp.sigma * h / factor;
            out.cell[static_cast<std::size_t>(m)] = j;
        }
        out.min_gap = std::min(out.min_gap, (v.xi(j + 1) - v.xi(j)).norm() / factor);
    }
    return out;
}

Index cyclic_gap(Index a, Index b, Index m, bool wraps) {
    Index d = std::abs(a - b);
    if (wraps) d = std::min(d, m - d);
    return d;
}

struct NodeSum {
    Point2 u = Point2::Zero();
    bool self_approach = false;
};

NodeSum cutoff_sum(const SheetState& s, const Samples& smp, Index node, double eps) {
    const bool periodic = s.topology == Topology::periodic;
    const double period = periodic ? s.period_shift().x() : 0.0;
    const Index m = s.distinct_nodes();
    const Point2 target = s.xi.col(node);
    NodeSum out;
    const double eps2 = eps * eps;
    const double near2 = 0.25 * smp.min_gap * smp.min_gap;
    for (Index k = 0; k < smp.x.cols(); ++k) {
        Point2 d = target - smp.x.col(k);
        if (periodic) d.x() -= period * std::round(d.x() / period);
        const double r2 = d.squaredNorm();
        if (r2 < eps2) continue;
        const Index c = smp.cell[static_cast<std::size_t>(k)];
        // Cells c and c + 1 both touch the node's own neighbourhood.
        if (r2 < near2 && cyclic_gap(c, node, m, s.wraps()) > 1 && cyclic_gap(c + 1, node, m, s.wraps()) > 1)
            out.self_approach = true;
        const Point2 kv = periodic ? periodic_kernel<double>(d, period) : biot_savart_kernel<double>(d);
        out.u += kv * smp.weight(k);
    }
    return out;
}

/// Velocities at all distinct nodes with the epsilon_cutoff layout at one
/// subcell count.
std::vector<NodeSum> cutoff_velocities(const SheetState& s, int factor, double eps) {
    const NodeView v(s);
    const Samples smp = build_samples(v, factor);
    const Index m = s.distinct_nodes();
    std::vector<NodeSum> out(static_cast<std::size_t>(m));
    detail::parallel_for(m, [&](std::int64_t i) { out[static_cast<std::size_t>(i)] = cutoff_sum(s, smp, i, eps); });
    return out;
}

}  // namespace

VelocityField sheet_velocity(const SheetState& s, const QuadratureSpec& q) {
    check_quadrature(q, s);
    const PvScheme scheme = resolve_scheme(q, s);
    const Index n = s.size();
    const Index m = s.distinct_nodes();
    const bool periodic = s.topology == Topology::periodic;
    const double period = periodic ? s.period_shift().x() : 0.0;
    VelocityField out;
    out.u = Points2::Zero(2, n);
    out.extrapolated.assign(static_cast<std::size_t>(n), false);

    if (scheme == PvScheme::epsilon_cutoff) {
        auto level = [&](int factor) {
            auto sums = cutoff_velocities(s, factor, q.epsilon);
            Points2 u(2, m);
            for (Index i = 0; i < m; ++i) {
                u.col(i) = sums[static_cast<std::size_t>(i)].u;
                out.self_approach = out.self_approach || sums[static_cast<std::size_t>(i)].self_approach;
            }
            return u;
        };
        Points2 u = level(q.refine_factor);
        if (q.richardson) {
            const Points2 u2 = level(2 * q.refine_factor);
            const Points2 u4 = level(4 * q.refine_factor);
            const Points2 a = (4.0 * u2 - u) / 3.0;
            const Points2 b = (4.0 * u4 - u2) / 3.0;
            u = (16.0 * b - a) / 15.0;
        }
        out.u.leftCols(m) = u;
    } else if (scheme == PvScheme::alternate_point) {
        const VectorXd w = parameter_weights(s);
        detail::parallel_for(m, [&](std::int64_t i) {
            Point2 acc = Point2::Zero();
            for (Index j = (i + 1) % 2; j < m; j += 2) {
                const Point2 d = s.xi.col(i) - s.xi.col(j);
                const Point2 kv = periodic ? periodic_kernel<double>(d, period) : biot_savart_kernel<double>(d);
                acc += kv * (2.0 * w(j) * s.sigma(j));
            }
            out.u.col(i) = acc;
        });
    } else {
        const VectorXd w = parameter_weights(s);
        detail::parallel_for(m, [&](std::int64_t i) {
            Point2 acc = Point2::Zero();
            for (Index j = 0; j < m; ++j) {
                if (j == i) continue;
                const Point2 d = s.xi.col(i) - s.xi.col(j);
                const Point2 kv = periodic ? periodic_kernel<double>(d, period, q.delta) : blob_kernel<double>(d, q.delta);
                acc += kv * (w(j) * s.sigma(j));
            }
            out.u.col(i) = acc;
        });
    }

    if (s.wraps()) {
        out.u.col(n - 1) = out.u.col(0);
    } else if (scheme != PvScheme::blob && n >= 6) {
        // Endpoint densities may be singular; use the interior limit.
        auto extrapolate = [&](Index target, Index first) {
            std::array<double, 4> nodes{};
            for (int k = 0; k < 4; ++k) nodes[static_cast<std::size_t>(k)] = s.eta(first + k);
            const auto wts = detail::lagrange4_weights(nodes, s.eta(target));
            Point2 u = Point2::Zero();
            for (int k = 0; k < 4; ++k) u += wts[static_cast<std::size_t>(k)] * out.u.col(first + k);
            out.u.col(target) = u;
            out.extrapolated[static_cast<std::size_t>(target)] = true;
        };
        extrapolate(0, 1);
        extrapolate(n - 1, n - 5);
    }
    return out;
}

PvResult pv_velocity(const SheetState& s, Index node, const QuadratureSpec& q) {
    if (node < 0 || node >= s.size()) throw SheetError(ErrorKind::invalid_state, "node index out of range");
    const VelocityField f = sheet_velocity(s, q);
    return {f.u.col(node), f.extrapolated[static_cast<std::size_t>(node)], f.self_approach};
}

OffSheetVelocity velocity_off_sheet(const SheetState& s, const Point2& x) {
    const VectorXd w = parameter_weights(s);
    const Index m = s.distinct_nodes();
    const bool periodic = s.topology == Topology::periodic;
    const double period = periodic ? s.period_shift().x() : 0.0;
    OffSheetVelocity out;
    for (Index j = 0; j < m; ++j) {
        const Point2 d = x - s.xi.col(j);
        const Point2 kv = periodic ? periodic_kernel<double>(d, period) : biot_savart_kernel<double>(d);
        out.u += kv * (w(j) * s.sigma(j));
    }
    const double spacing = total_length(s) / static_cast<double>(s.size() - 1);
    out.near_singular = distance_to_curve(s, x) < spacing;
    return out;
}

VectorXd maximal_operator(const SheetState& s, const std::vector<double>& eps_grid, const QuadratureSpec& q) {
    for (double e : eps_grid)
        if (!(e > 0.0)) throw SheetError(ErrorKind::invalid_state, "eps grid must be positive");
    const NodeView v(s);
    const Samples smp = build_samples(v, q.refine_factor);
    const VelocityField pv = sheet_velocity(s, q);
    const bool periodic = s.topology == Topology::periodic;
    const double period = periodic ? s.period_shift().x() : 0.0;
    const Index m = s.distinct_nodes();
    VectorXd out(m);
    detail::parallel_for(m, [&](std::int64_t i) {
        const Index count = smp.x.cols();
        std::vector<double> dist(static_cast<std::size_t>(count));
        Points2 contrib(2, count);
        for (Index k = 0; k < count; ++k) {
            Point2 d = s.xi.col(i) - smp.x.col(k);
            if (periodic) d.x() -= period * std::round(d.x() / period);
            dist[static_cast<std::size_t>(k)] = d.norm();
            contrib.col(k) = (periodic ? periodic_kernel<double>(d, period) : biot_savart_kernel<double>(d)) * smp.weight(k);
        }
        std::vector<Index> order(static_cast<std::size_t>(count));
        std::iota(order.begin(), order.end(), Index{0});
        std::sort(order.begin(), order.end(), [&](Index a, Index b) {
            return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)];
        });
        // prefix(k) = sum over the k farthest samples
        Points2 prefix = Points2::Zero(2, count + 1);
        for (Index k = 0; k < count; ++k) prefix.col(k + 1) = prefix.col(k) + contrib.col(order[static_cast<std::size_t>(k)]);
        double best = pv.u.col(i).norm();
        for (double e : eps_grid) {
            const auto it = std::partition_point(order.begin(), order.end(),
                                                 [&](Index k) { return dist[static_cast<std::size_t>(k)] >= e; });
            best = std::max(best, prefix.col(it - order.begin()).norm());
        }
        out(i) = best;
    });
    return out;
}

std::optional<double> h_phi(const Point2& x, const Point2& y, double t, const TestFunction& phi) {
    if (x == y) return std::nullopt;
    return 0.5 * (phi.gradient(x, t) - phi.gradient(y, t)).dot(biot_savart_kernel<double>(x - y));
}

double h_phi_diagonal(const Point2& x, const Point2& tau, double t, const TestFunction& phi) {
    const Point2 perp(-tau.y(), tau.x());
    return perp.dot(phi.hessian(x, t) * tau) / (4.0 * kPi);
}

}  // namespace vsheet
