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
#include "vsheet/geometry.hpp"
#include "vsheet/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace vsheet;

namespace {

Points2 field(const SheetState& s, const auto& f) {
    Points2 u(2, s.distinct_nodes());
    for (Index j = 0; j < u.cols(); ++j) u.col(j) = f(Point2(s.xi.col(j)));
    return u;
}

/// Amplitude of the sin mode k of y over one period.
double mode_amplitude(const SheetState& s, int k) {
    double a = 0.0, b = 0.0;
    const Index n = s.distinct_nodes();
    for (Index j = 0; j < n; ++j) {
        const double x = 2.0 * kPi * k * static_cast<double>(j) / static_cast<double>(n);
        a += s.xi(1, j) * std::sin(x);
        b += s.xi(1, j) * std::cos(x);
    }
    return 2.0 * std::hypot(a, b) / static_cast<double>(n);
}

}  // namespace

TEST_CASE("tangential coefficient examples") {
    const SheetState seg = segment_state(32, 1.0, 1.0);
    const VectorXd a0 = recover_tangential_coefficient(seg, field(seg, [](const Point2&) { return Point2(0.3, -1.0); }));
    CHECK(a0.cwiseAbs().maxCoeff() <= 1e-15);
    const double lambda = 0.7;
    const VectorXd a1 = recover_tangential_coefficient(seg, field(seg, [&](const Point2& x) { return Point2(lambda * x); }));
    for (Index j = 0; j < seg.size(); ++j) CHECK(a1(j) == doctest::Approx(lambda * seg.eta(j)).epsilon(1e-12));
    const SheetState circ = reparametrize_arclength(circle_state(128, 1.0, 1.0), 128);
    const VectorXd a2 = recover_tangential_coefficient(circ, field(circ, [](const Point2& x) { return Point2(-x.y(), x.x()); }));
    CHECK(a2.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(recover_tangential_coefficient(circle_state(16, 1.0, 1.0), Points2::Zero(2, 16)), SheetError);
}

TEST_CASE("total circulation examples") {
    CHECK(std::abs(total_circulation(prandtl_munk_state(256, 0.0))) <= 1e-14);
    CHECK(total_circulation(segment_state(10, 2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("configuration errors") {
    EvolutionConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(check_config(cfg), SheetError);
    cfg.dt = 0.1;
    cfg.remesh_every = 0;
    CHECK_THROWS_AS(check_config(cfg), SheetError);
}

TEST_CASE("flat uniform sheet is a fixed point of a step") {
    const SheetState s = flat_uniform_state(64, 1.0, 1.0);
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    const SheetState next = step(s, cfg);
    CHECK((next.xi - s.xi).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("normal defect of exact and translated wing trajectories") {
    const SheetState s0 = prandtl_munk_state(128, 0.0);
    const Points2 u = sheet_velocity(s0).u;
    const double dt = 0.01;
    const VectorXd b = normal_defect(s0, prandtl_munk_state(128, dt), u);
    for (Index j = 1; j < 128; ++j) CHECK(std::abs(b(j)) <= 1e-9);
    const double c = 0.3;
    SheetState moved = prandtl_munk_state(128, -2.0 * c * dt);
    moved.t = dt;
    const VectorXd bc = normal_defect(s0, moved, u);
    for (Index j = 1; j < 128; ++j) CHECK(std::abs(std::abs(bc(j)) - std::abs(c + 0.5)) <= 1e-9);
    CHECK_THROWS_AS(normal_defect(s0, prandtl_munk_state(64, dt), u), SheetError);
}

TEST_CASE("arclength scheme conserves sub-segment circulation") {
    EvolutionConfig cfg;
    cfg.scheme = EvolutionScheme::arclength;
    cfg.dt = 0.004;
    cfg.t_end = 0.4;
    cfg.markers = 8;
    cfg.fourier_filter_level = 1e-12;
    const SimulationResult r = simulate(circle_state(128, 1.0, 1.0, 0.2, 1), cfg);
    for (std::size_t k = 0; k < r.circulation.size(); ++k) {
        CHECK(std::abs(r.circulation[k] - r.circulation[0]) <= 1e-8 * std::abs(r.circulation[0]));
        CHECK((r.marker_circulation[k] - r.marker_circulation[0]).cwiseAbs().maxCoeff() <= 1e-8 * std::abs(r.circulation[0]));
    }
    CHECK(r.remeshes > 0);
    CHECK(r.remesh_chord_deviation <= 1e-6);
}

TEST_CASE("perturbation grows at the linearized rate") {
    OracleSpec spec;
    spec.kind = OracleKind::periodic_perturbed;
    spec.n = 64;
    spec.amplitude = 1e-5;
    const double rate = kh_linearized_growth(spec).rate;
    EvolutionConfig cfg;
    cfg.dt = 0.005;
    cfg.t_end = 1.2;
    cfg.output_every = 20;
    cfg.fourier_filter_level = 1e-14;
    const SimulationResult r = simulate(oracle_initial_state(spec), cfg);
    const auto& st = r.trajectory.states;
    // Late-time logarithmic slope of the mode amplitude.
    const double slope = std::log(mode_amplitude(st.back(), 1) / mode_amplitude(st[st.size() - 3], 1)) /
                         (st.back().t - st[st.size() - 3].t);
    CHECK(mode_amplitude(st.back(), 1) > 5.0 * spec.amplitude);
    CHECK(slope == doctest::Approx(rate).epsilon(0.03));
}

TEST_CASE("wing tips make Lagrangian runs abort") {
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(simulate(prandtl_munk_state(32, 0.0), cfg), SheetError);
}
