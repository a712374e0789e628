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

#include "vsheet/oracles.hpp"

#include <array>
#include <cmath>
#include <random>

namespace vsheet {

std::string_view to_string(OracleKind kind) {
    switch (kind) {
        case OracleKind::flat_uniform: return "flat_uniform";
        case OracleKind::prandtl_munk: return "prandtl_munk";
        case OracleKind::periodic_perturbed: return "periodic_perturbed";
    }
    return "prandtl_munk";
}

OracleKind oracle_kind_from_string(std::string_view name) {
    if (name == "flat_uniform") return OracleKind::flat_uniform;
    if (name == "prandtl_munk") return OracleKind::prandtl_munk;
    if (name == "periodic_perturbed") return OracleKind::periodic_perturbed;
    throw SheetError(ErrorKind::config, "unknown oracle kind '" + std::string(name) + "'");
}

SheetState prandtl_munk_state(Index n, double t) {
    if (n < 2) throw SheetError(ErrorKind::invalid_state, "need at least 2 cells");
    SheetState s;
    s.t = t;
    s.param_kind = ParamKind::lagrangian;
    s.topology = Topology::open;
    s.eta.resize(n + 1);
    s.xi.resize(2, n + 1);
    s.sigma.resize(n + 1);
    for (Index j = 0; j <= n; ++j) {
        const double e = kPi * static_cast<double>(j) / static_cast<double>(n);
        s.eta(j) = e;
        s.xi.col(j) = Point2(-std::cos(e), -0.5 * t);
        s.sigma(j) = -std::cos(e);
    }
    // Exact symmetric values at the centre and ends.
    if (n % 2 == 0) {
        s.xi(0, n / 2) = 0.0;
        s.sigma(n / 2) = 0.0;
    }
    s.xi(0, 0) = -1.0;
    s.xi(0, n) = 1.0;
    return s;
}

SheetTrajectory prandtl_munk_trajectory(Index n, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw SheetError(ErrorKind::config, "need dt > 0 and t_end > 0");
    const auto steps = static_cast<Index>(std::llround(t_end / dt));
    SheetTrajectory traj;
    for (Index k = 0; k <= steps; ++k)
        traj.states.push_back(prandtl_munk_state(n, t_end * static_cast<double>(k) / static_cast<double>(steps)));
    return traj;
}

SheetState flat_uniform_state(Index n, double length, double gamma) {
    return periodic_perturbed(n, length, gamma, 0.0, 1);
}

SheetState periodic_perturbed(Index n, double length, double gamma, double amplitude, int wavenumber) {
    if (n < 4) throw SheetError(ErrorKind::invalid_state, "need at least 4 nodes");
    if (!(length > 0.0)) throw SheetError(ErrorKind::invalid_state, "period must be positive");
    SheetState s;
    s.param_kind = ParamKind::lagrangian;
    s.topology = Topology::periodic;
    s.eta.resize(n + 1);
    s.xi.resize(2, n + 1);
    s.sigma = VectorXd::Constant(n + 1, gamma);
    const double kappa = 2.0 * kPi * wavenumber / length;
    for (Index j = 0; j <= n; ++j) {
        const double x = length * static_cast<double>(j) / static_cast<double>(n);
        s.eta(j) = x;
        s.xi.col(j) = Point2(x, amplitude * std::sin(kappa * x));
    }
    s.xi(1, n) = s.xi(1, 0);
    return s;
}

SheetState segment_state(Index n, double length, double gamma) {
    if (n < 2) throw SheetError(ErrorKind::invalid_state, "need at least 2 cells");
    if (!(length > 0.0)) throw SheetError(ErrorKind::invalid_state, "length must be positive");
    SheetState s;
    s.param_kind = ParamKind::arclength;
    s.topology = Topology::open;
    s.eta = VectorXd::LinSpaced(n + 1, 0.0, length);
    s.xi = Points2::Zero(2, n + 1);
    s.xi.row(0) = s.eta.transpose();
    s.sigma = VectorXd::Constant(n + 1, gamma);
    return s;
}

SheetState circle_state(Index n, double radius, double gamma, double amplitude, int mode) {
    if (n < 4) throw SheetError(ErrorKind::invalid_state, "need at least 4 nodes");
    if (!(radius > 0.0)) throw SheetError(ErrorKind::invalid_state, "radius must be positive");
    SheetState s;
    s.param_kind = ParamKind::lagrangian;
    s.topology = Topology::closed;
    s.eta.resize(n + 1);
    s.xi.resize(2, n + 1);
    s.sigma.resize(n + 1);
    for (Index j = 0; j <= n; ++j) {
        const double e = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
        s.eta(j) = e;
        s.xi.col(j) = radius * Point2(std::cos(e), std::sin(e));
        s.sigma(j) = gamma + amplitude * std::sin(mode * e);
    }
    s.xi.col(n) = s.xi.col(0);
    s.sigma(n) = s.sigma(0);
    return s;
}

SheetState random_smooth_state(std::uint64_t seed, Index n, Topology topology) {
    if (n < 4) throw SheetError(ErrorKind::invalid_state, "need at least 4 nodes");
    std::mt19937_64 rng(seed);
    // Uniform on [-1, 1) from the top 53 bits, independent of the library's distributions.
    auto uniform = [&rng] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    constexpr int kModes = 4;
    std::array<double, kModes> ga{}, gb{}, da{}, db{};
    for (int k = 0; k < kModes; ++k) {
        ga[k] = 0.06 * uniform() / (k + 1);
        gb[k] = 0.06 * uniform() / (k + 1);
        da[k] = 0.4 * uniform() / (k + 1);
        db[k] = 0.4 * uniform() / (k + 1);
    }
    auto series = [](const std::array<double, kModes>& a, const std::array<double, kModes>& b, double e) {
        double v = 0.0;
        for (int k = 0; k < kModes; ++k) v += a[k] * std::cos((k + 1) * e) + b[k] * std::sin((k + 1) * e);
        return v;
    };
    SheetState s;
    s.param_kind = ParamKind::lagrangian;
    s.topology = topology;
    const Index m = topology == Topology::open ? n : n + 1;
    s.eta.resize(m);
    s.xi.resize(2, m);
    s.sigma.resize(m);
    for (Index j = 0; j < m; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(topology == Topology::open ? n - 1 : n);
        switch (topology) {
            case Topology::closed: {
                const double e = 2.0 * kPi * u;
                const double r = 1.0 + series(ga, gb, e);
                s.eta(j) = e;
                s.xi.col(j) = r * Point2(std::cos(e), std::sin(e));
                s.sigma(j) = 1.0 + series(da, db, e);
                break;
            }
            case Topology::periodic: {
                const double e = 2.0 * kPi * u;
                s.eta(j) = u;
                s.xi.col(j) = Point2(u, series(ga, gb, e) - series(ga, gb, 0.0));
                s.sigma(j) = 1.0 + series(da, db, e);
                break;
            }
            case Topology::open: {
                const double x = 2.0 * u - 1.0;
                s.eta(j) = x;
                s.xi.col(j) = Point2(x, series(ga, gb, kPi * x));
                s.sigma(j) = 1.0 + series(da, db, kPi * x);
                break;
            }
        }
    }
    if (topology == Topology::closed) s.xi.col(n) = s.xi.col(0);
    if (topology == Topology::periodic) s.xi(1, n) = s.xi(1, 0);
    if (topology != Topology::open) s.sigma(n) = s.sigma(0);
    return s;
}

SheetState oracle_initial_state(const OracleSpec& spec) {
    switch (spec.kind) {
        case OracleKind::prandtl_munk: return prandtl_munk_state(spec.n, 0.0);
        case OracleKind::flat_uniform: return flat_uniform_state(spec.n, spec.length, spec.gamma);
        case OracleKind::periodic_perturbed:
            return periodic_perturbed(spec.n, spec.length, spec.gamma, spec.amplitude, spec.wavenumber);
    }
    return prandtl_munk_state(spec.n, 0.0);
}

GrowthResult kh_linearized_growth(const OracleSpec& spec, const QuadratureSpec& q) {
    GrowthResult out;
    const SheetState base = flat_uniform_state(spec.n, spec.length, spec.gamma);
    const Index m = spec.n;
    const double kappa = 2.0 * kPi * spec.wavenumber / spec.length;
    const double norm = std::sqrt(2.0 / static_cast<double>(m));

    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * m, 4);
    for (Index j = 0; j < m; ++j) {
        const double x = base.xi(0, j);
        basis(2 * j, 0) = norm * std::cos(kappa * x);
        basis(2 * j, 1) = norm * std::sin(kappa * x);
        basis(2 * j + 1, 2) = norm * std::cos(kappa * x);
        basis(2 * j + 1, 3) = norm * std::sin(kappa * x);
    }

    auto velocity = [&](const Eigen::VectorXd& displacement) {
        SheetState s = base;
        for (Index j = 0; j < m; ++j) s.xi.col(j) += displacement.segment<2>(2 * j);
        s.xi.col(m) = s.xi.col(0) + base.period_shift();
        const Points2 u = sheet_velocity(s, q).u;
        Eigen::VectorXd flat(2 * m);
        for (Index j = 0; j < m; ++j) flat.segment<2>(2 * j) = u.col(j);
        return flat;
    };
    const double h = 1e-6 * spec.length;
    for (int b = 0; b < 4; ++b) {
        const Eigen::VectorXd dir = basis.col(b);
        const Eigen::VectorXd jv = (velocity(h * dir) - velocity(-h * dir)) / (2.0 * h);
        out.restricted.col(b) = basis.transpose() * jv;
    }

    Eigen::Vector4d v(0.0, 0.0, 0.0, spec.amplitude / norm);
    if (v.norm() == 0.0) {
        out.converged = true;
        return out;
    }
    const double shift = out.restricted.norm();
    const Eigen::Matrix4d shifted = out.restricted + shift * Eigen::Matrix4d::Identity();
    v.normalize();
    double previous = 0.0;
    for (int it = 1; it <= 20000; ++it) {
        Eigen::Vector4d w = shifted * v;
        const double lambda = v.dot(w);
        v = w.normalized();
        out.iterations = it;
        if (it > 1 && std::abs(lambda - previous) <= 1e-13 * std::max(1.0, std::abs(lambda))) {
            out.converged = true;
            out.rate = lambda - shift;
            return out;
        }
        previous = lambda;
    }
    out.rate = previous - shift;
    throw SheetError(ErrorKind::non_convergence, "power iteration did not converge");
}

double prandtl_munk_euler_gap(const TestFunction& phi, double t_end) {
    // Composite 8-point Gauss-Legendre in time.
    static const double x8[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    static const double w8[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const int panels = 64;
    const double stop = std::min(t_end, phi.profile().stop_time());
    const double h = stop / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int k = 0; k < 4; ++k)
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                const double t = mid + sgn * 0.5 * h * x8[k];
                const double gap = phi.gradient(Point2(1.0, -0.5 * t), t).y() - phi.gradient(Point2(-1.0, -0.5 * t), t).y();
                total += 0.5 * h * w8[k] * gap;
            }
    }
    return kPi / 8.0 * total;
}

}  // namespace vsheet
